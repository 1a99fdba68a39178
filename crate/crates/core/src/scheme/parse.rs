//! Parsing and canonical formatting of code strings.
//!
//! Grammar (case-insensitive on input, upper-case canonical on output):
//!
//! ```text
//! code      = activity [":" qualifier] "/" entity [("//" | "/") criterion]
//! activity  = "MANAGE" | "READ" | "REQUEST" | discuss-verb
//! entity    = task | artifact | message        (restricted per activity)
//! task      = "PROJECT" | "MEETING"
//! artifact  = "DOCUMENT" | "SECTION-" n        (n >= 1)
//! message   = message-kind "-" m               (m >= 1)
//! criterion = letters                          (only after a discuss verb)
//! ```
//!
//! The qualifier is only legal on discuss verbs. `ACCEPTATION` is accepted as
//! an input alias for the canonical `ACCEPTANCE` message kind. A single `/`
//! before the criterion is accepted on input; the canonical form uses `//`.

use thiserror::Error;

use super::{
    ActivityKind, ArtifactRef, Code, Criterion, DiscussVerb, EntityKind, EntityRef, MessageKind,
    TaskKind,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown activity `{0}`")]
    UnknownActivity(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("missing or invalid label")]
    MissingLabel,
    #[error("criterion separator after non-discuss activity")]
    CriterionOnNonDiscuss,
    #[error("trailing garbage `{0}`")]
    TrailingGarbage(String),
}

/// A parse failure, annotated with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {pos}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: usize,
}

impl ParseError {
    fn new(kind: ParseErrorKind, pos: usize) -> ParseError {
        ParseError { kind, pos }
    }
}

struct Scanner<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Consumes an ASCII-alphabetic run, upper-cased.
    fn word(&mut self) -> (usize, String) {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            self.bump();
        }
        (start, self.text[start..self.pos].to_ascii_uppercase())
    }

    fn digits(&mut self) -> (usize, &'a str) {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        (start, &self.text[start..self.pos])
    }
}

fn activity_from_token(token: &str) -> Option<ActivityKind> {
    let activity = match token {
        "MANAGE" => ActivityKind::Manage,
        "READ" => ActivityKind::Read,
        "REQUEST" => ActivityKind::Request,
        "ACCEPT" => ActivityKind::Discuss(DiscussVerb::Accept),
        "DEVELOP" => ActivityKind::Discuss(DiscussVerb::Develop),
        "EVALUATE" => ActivityKind::Discuss(DiscussVerb::Evaluate),
        "EXPLAIN" => ActivityKind::Discuss(DiscussVerb::Explain),
        "HYPOTHESIZE" => ActivityKind::Discuss(DiscussVerb::Hypothesize),
        "INFORM" => ActivityKind::Discuss(DiscussVerb::Inform),
        "JUSTIFY" => ActivityKind::Discuss(DiscussVerb::Justify),
        "REJECT" => ActivityKind::Discuss(DiscussVerb::Reject),
        _ => return None,
    };
    Some(activity)
}

fn message_kind_from_token(token: &str) -> Option<MessageKind> {
    let kind = match token {
        "ACCEPTANCE" | "ACCEPTATION" => MessageKind::Acceptance,
        "DEVELOPMENT" => MessageKind::Development,
        "EVALUATION" => MessageKind::Evaluation,
        "EXPLANATION" => MessageKind::Explanation,
        "HYPOTHESIS" => MessageKind::Hypothesis,
        "INFORMATION" => MessageKind::Information,
        "JUSTIFICATION" => MessageKind::Justification,
        "REJECTION" => MessageKind::Rejection,
        _ => return None,
    };
    Some(kind)
}

/// Parses one code string. Rejects anything outside the grammar with an error
/// pointing at the offending byte.
pub fn parse_code(text: &str) -> Result<Code, ParseError> {
    let mut s = Scanner { text, pos: 0 };

    let (activity_pos, activity_token) = s.word();
    if activity_token.is_empty() {
        return Err(ParseError::new(
            ParseErrorKind::UnknownActivity(String::new()),
            activity_pos,
        ));
    }
    let activity = activity_from_token(&activity_token).ok_or_else(|| {
        ParseError::new(
            ParseErrorKind::UnknownActivity(activity_token.clone()),
            activity_pos,
        )
    })?;

    let qualifier = if s.peek() == Some(':') {
        let colon_pos = s.pos;
        if activity.discuss_verb().is_none() {
            return Err(ParseError::new(
                ParseErrorKind::UnknownActivity(format!("{activity_token}:")),
                colon_pos,
            ));
        }
        s.bump();
        let tag_start = s.pos;
        while matches!(s.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            s.bump();
        }
        if s.pos == tag_start {
            return Err(ParseError::new(
                ParseErrorKind::UnknownActivity(format!("{activity_token}:")),
                colon_pos,
            ));
        }
        Some(text[tag_start..s.pos].to_ascii_uppercase())
    } else {
        None
    };

    if !s.eat('/') {
        let pos = s.pos;
        let rest = text[pos..].to_string();
        return Err(ParseError::new(ParseErrorKind::UnknownEntity(rest), pos));
    }

    let entity = parse_entity(&mut s, activity)?;

    let criterion = if s.peek() == Some('/') {
        let sep_pos = s.pos;
        s.bump();
        // canonical form uses `//`; a single `/` is accepted on input
        s.eat('/');
        if activity.discuss_verb().is_none() {
            return Err(ParseError::new(
                ParseErrorKind::CriterionOnNonDiscuss,
                sep_pos,
            ));
        }
        let (token_pos, token) = s.word();
        if token.is_empty() {
            return Err(ParseError::new(
                ParseErrorKind::TrailingGarbage(text[sep_pos..].to_string()),
                sep_pos,
            ));
        }
        let _ = token_pos;
        Some(Criterion::from_token(&token))
    } else {
        None
    };

    if s.pos < text.len() {
        return Err(ParseError::new(
            ParseErrorKind::TrailingGarbage(text[s.pos..].to_string()),
            s.pos,
        ));
    }

    Ok(Code {
        activity,
        entity,
        criterion,
        qualifier,
    })
}

fn parse_entity(s: &mut Scanner<'_>, activity: ActivityKind) -> Result<EntityRef, ParseError> {
    let (token_pos, token) = s.word();
    if token.is_empty() {
        return Err(ParseError::new(
            ParseErrorKind::UnknownEntity(String::new()),
            token_pos,
        ));
    }

    let allowed: &[EntityKind] = match activity.group() {
        super::ActivityGroup::Manage => &[EntityKind::Task],
        super::ActivityGroup::Read => &[EntityKind::Artifact],
        super::ActivityGroup::Request | super::ActivityGroup::Discuss => {
            &[EntityKind::Artifact, EntityKind::Message]
        }
    };

    let reject_kind = |kind: EntityKind, token: &str, pos: usize| -> Result<(), ParseError> {
        if allowed.contains(&kind) {
            Ok(())
        } else {
            Err(ParseError::new(
                ParseErrorKind::UnknownEntity(format!(
                    "{token} ({} entity not valid for {})",
                    kind.token(),
                    activity.token()
                )),
                pos,
            ))
        }
    };

    match token.as_str() {
        "PROJECT" => {
            reject_kind(EntityKind::Task, &token, token_pos)?;
            Ok(EntityRef::Task(TaskKind::Project))
        }
        "MEETING" => {
            reject_kind(EntityKind::Task, &token, token_pos)?;
            Ok(EntityRef::Task(TaskKind::Meeting))
        }
        "DOCUMENT" => {
            reject_kind(EntityKind::Artifact, &token, token_pos)?;
            Ok(EntityRef::Artifact(ArtifactRef::Document))
        }
        "SECTION" => {
            reject_kind(EntityKind::Artifact, &token, token_pos)?;
            let n = parse_label(s)?;
            Ok(EntityRef::Artifact(ArtifactRef::Section(n)))
        }
        other => match message_kind_from_token(other) {
            Some(kind) => {
                reject_kind(EntityKind::Message, &token, token_pos)?;
                let label = parse_label(s)?;
                Ok(EntityRef::Message { kind, label })
            }
            None => Err(ParseError::new(
                ParseErrorKind::UnknownEntity(token),
                token_pos,
            )),
        },
    }
}

/// Parses the `-n` suffix of a labeled entity; labels are decimal and >= 1.
fn parse_label(s: &mut Scanner<'_>) -> Result<u32, ParseError> {
    if !s.eat('-') {
        return Err(ParseError::new(ParseErrorKind::MissingLabel, s.pos));
    }
    let (digits_pos, digits) = s.digits();
    if digits.is_empty() {
        return Err(ParseError::new(ParseErrorKind::MissingLabel, digits_pos));
    }
    match digits.parse::<u32>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(ParseError::new(ParseErrorKind::MissingLabel, digits_pos)),
    }
}

/// Emits the canonical upper-case form of a code: `/` before the entity and
/// `//` before the criterion. Re-parsing the output always yields the same
/// code.
pub fn format_code(code: &Code) -> String {
    let mut out = String::new();
    out.push_str(code.activity.token());
    if let Some(tag) = &code.qualifier {
        out.push(':');
        out.push_str(tag);
    }
    out.push('/');
    match code.entity {
        EntityRef::Task(task) => out.push_str(task.token()),
        EntityRef::Artifact(ArtifactRef::Document) => out.push_str("DOCUMENT"),
        EntityRef::Artifact(ArtifactRef::Section(n)) => {
            out.push_str("SECTION-");
            out.push_str(&n.to_string());
        }
        EntityRef::Message { kind, label } => {
            out.push_str(kind.token());
            out.push('-');
            out.push_str(&label.to_string());
        }
    }
    if let Some(criterion) = &code.criterion {
        out.push_str("//");
        out.push_str(criterion.token());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::ActivityGroup;

    #[test]
    fn parses_discuss_on_section_with_criterion() {
        let code = parse_code("EVALUATE/SECTION-3//FORM").unwrap();
        assert_eq!(code.activity, ActivityKind::Discuss(DiscussVerb::Evaluate));
        assert_eq!(code.entity, EntityRef::Artifact(ArtifactRef::Section(3)));
        assert_eq!(code.criterion, Some(Criterion::Form));
        assert_eq!(code.qualifier, None);
    }

    #[test]
    fn parses_manage_on_meeting() {
        let code = parse_code("MANAGE/MEETING").unwrap();
        assert_eq!(code.activity, ActivityKind::Manage);
        assert_eq!(code.entity, EntityRef::Task(TaskKind::Meeting));
        assert_eq!(code.criterion, None);
    }

    #[test]
    fn parses_reject_on_message_with_criterion() {
        let code = parse_code("REJECT/EVALUATION-12//CONTENT").unwrap();
        assert_eq!(code.activity, ActivityKind::Discuss(DiscussVerb::Reject));
        assert_eq!(
            code.entity,
            EntityRef::Message {
                kind: MessageKind::Evaluation,
                label: 12
            }
        );
        assert_eq!(code.criterion, Some(Criterion::Content));
    }

    #[test]
    fn rejects_task_entity_under_discuss_verb() {
        let err = parse_code("ACCEPT/PROJECT").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnknownEntity(_)));
        assert_eq!(err.pos, 7);
    }

    #[test]
    fn single_slash_criterion_separator_is_accepted() {
        let loose = parse_code("EVALUATE/SECTION-3/FORM").unwrap();
        let strict = parse_code("EVALUATE/SECTION-3//FORM").unwrap();
        assert_eq!(loose, strict);
        assert_eq!(format_code(&loose), "EVALUATE/SECTION-3//FORM");
    }

    #[test]
    fn input_is_case_insensitive() {
        let code = parse_code("evaluate/section-3//form").unwrap();
        assert_eq!(format_code(&code), "EVALUATE/SECTION-3//FORM");
    }

    #[test]
    fn acceptation_is_an_alias_for_acceptance() {
        let code = parse_code("REJECT/ACCEPTATION-4").unwrap();
        assert_eq!(format_code(&code), "REJECT/ACCEPTANCE-4");
    }

    #[test]
    fn qualifier_is_preserved_on_discuss_verbs() {
        let code = parse_code("evaluate:neg/SECTION-2//CONTENT").unwrap();
        assert_eq!(code.qualifier.as_deref(), Some("NEG"));
        assert_eq!(format_code(&code), "EVALUATE:NEG/SECTION-2//CONTENT");
    }

    #[test]
    fn qualifier_on_non_discuss_is_rejected() {
        let err = parse_code("MANAGE:X/MEETING").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnknownActivity(_)));
        assert_eq!(err.pos, 6);
    }

    #[test]
    fn unknown_activity_is_position_annotated() {
        let err = parse_code("FROB/SECTION-1").unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::UnknownActivity("FROB".to_string())
        );
        assert_eq!(err.pos, 0);
    }

    #[test]
    fn section_without_label_is_missing_label() {
        let err = parse_code("READ/SECTION-").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingLabel);
        assert_eq!(err.pos, 13);
        let err = parse_code("READ/SECTION").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingLabel);
        let err = parse_code("EVALUATE/EVALUATION-0").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingLabel);
    }

    #[test]
    fn criterion_on_non_discuss_is_rejected() {
        let err = parse_code("READ/DOCUMENT//FORM").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::CriterionOnNonDiscuss);
        assert_eq!(err.pos, 13);
        let err = parse_code("MANAGE/PROJECT/FORM").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::CriterionOnNonDiscuss);
    }

    #[test]
    fn trailing_garbage_is_rejected_with_position() {
        let err = parse_code("MANAGE/MEETING!").unwrap_err();
        assert_eq!(err.pos, 14);
        assert!(matches!(err.kind, ParseErrorKind::TrailingGarbage(_)));
        let err = parse_code("EVALUATE/SECTION-3//FORM/CONTENT").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::TrailingGarbage(_)));
    }

    #[test]
    fn empty_input_is_rejected_at_byte_zero() {
        let err = parse_code("").unwrap_err();
        assert_eq!(err.pos, 0);
    }

    #[test]
    fn formats_examples_canonically() {
        let code = Code::new(
            ActivityKind::Discuss(DiscussVerb::Evaluate),
            EntityRef::Artifact(ArtifactRef::Section(3)),
        )
        .with_criterion(Criterion::Form);
        assert_eq!(format_code(&code), "EVALUATE/SECTION-3//FORM");

        let code = Code::new(
            ActivityKind::Read,
            EntityRef::Artifact(ArtifactRef::Document),
        );
        assert_eq!(format_code(&code), "READ/DOCUMENT");

        let code = Code::new(
            ActivityKind::Discuss(DiscussVerb::Inform),
            EntityRef::Message {
                kind: MessageKind::Information,
                label: 7,
            },
        );
        let formatted = format_code(&code);
        assert_eq!(formatted, "INFORM/INFORMATION-7");
        assert_eq!(parse_code(&formatted).unwrap(), code);
    }

    #[test]
    fn activity_tokens_do_not_collide_with_entity_tokens() {
        // exclusivity at the vocabulary level: each token resolves one way
        for group in ActivityGroup::ALL {
            assert!(message_kind_from_token(group.token()).is_none());
        }
        for verb in DiscussVerb::ALL {
            assert!(message_kind_from_token(verb.token()).is_none());
        }
        for kind in crate::scheme::MessageKind::ALL {
            assert!(activity_from_token(kind.token()).is_none());
        }
    }
}
