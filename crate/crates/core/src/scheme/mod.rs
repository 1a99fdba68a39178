//! Coding-scheme data model: the vocabulary of activity/entity/criterion codes,
//! the legality rules that decide which combinations are valid, and the scheme
//! customized for technical review meetings (TRM).

mod file;
mod parse;

pub use file::{load_scheme, parse_scheme, SchemeFileError};
pub use parse::{format_code, parse_code, ParseError, ParseErrorKind};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

/// One of the eight detailed discussion activities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscussVerb {
    Accept,
    Develop,
    Evaluate,
    Explain,
    Hypothesize,
    Inform,
    Justify,
    Reject,
}

impl DiscussVerb {
    pub const ALL: [DiscussVerb; 8] = [
        DiscussVerb::Accept,
        DiscussVerb::Develop,
        DiscussVerb::Evaluate,
        DiscussVerb::Explain,
        DiscussVerb::Hypothesize,
        DiscussVerb::Inform,
        DiscussVerb::Justify,
        DiscussVerb::Reject,
    ];

    pub fn token(self) -> &'static str {
        match self {
            DiscussVerb::Accept => "ACCEPT",
            DiscussVerb::Develop => "DEVELOP",
            DiscussVerb::Evaluate => "EVALUATE",
            DiscussVerb::Explain => "EXPLAIN",
            DiscussVerb::Hypothesize => "HYPOTHESIZE",
            DiscussVerb::Inform => "INFORM",
            DiscussVerb::Justify => "JUSTIFY",
            DiscussVerb::Reject => "REJECT",
        }
    }

    /// Short label used in distribution buckets and sequence alphabets.
    pub fn abbrev(self) -> &'static str {
        match self {
            DiscussVerb::Accept => "ACC",
            DiscussVerb::Develop => "DEV",
            DiscussVerb::Evaluate => "EVAL",
            DiscussVerb::Explain => "EXPL",
            DiscussVerb::Hypothesize => "HYP",
            DiscussVerb::Inform => "INF",
            DiscussVerb::Justify => "JUST",
            DiscussVerb::Reject => "REJ",
        }
    }
}

/// The kind of message an entity reference can point at. Each kind is the
/// outcome of exactly one discuss verb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Acceptance,
    Development,
    Evaluation,
    Explanation,
    Hypothesis,
    Information,
    Justification,
    Rejection,
}

impl MessageKind {
    pub const ALL: [MessageKind; 8] = [
        MessageKind::Acceptance,
        MessageKind::Development,
        MessageKind::Evaluation,
        MessageKind::Explanation,
        MessageKind::Hypothesis,
        MessageKind::Information,
        MessageKind::Justification,
        MessageKind::Rejection,
    ];

    pub fn token(self) -> &'static str {
        match self {
            MessageKind::Acceptance => "ACCEPTANCE",
            MessageKind::Development => "DEVELOPMENT",
            MessageKind::Evaluation => "EVALUATION",
            MessageKind::Explanation => "EXPLANATION",
            MessageKind::Hypothesis => "HYPOTHESIS",
            MessageKind::Information => "INFORMATION",
            MessageKind::Justification => "JUSTIFICATION",
            MessageKind::Rejection => "REJECTION",
        }
    }
}

/// Maps a discuss verb to the kind of message it produces. Total bijection
/// over the eight verbs.
pub fn message_kind_of(verb: DiscussVerb) -> MessageKind {
    match verb {
        DiscussVerb::Accept => MessageKind::Acceptance,
        DiscussVerb::Develop => MessageKind::Development,
        DiscussVerb::Evaluate => MessageKind::Evaluation,
        DiscussVerb::Explain => MessageKind::Explanation,
        DiscussVerb::Hypothesize => MessageKind::Hypothesis,
        DiscussVerb::Inform => MessageKind::Information,
        DiscussVerb::Justify => MessageKind::Justification,
        DiscussVerb::Reject => MessageKind::Rejection,
    }
}

/// The four top-level activity groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivityGroup {
    Manage,
    Read,
    Request,
    Discuss,
}

impl ActivityGroup {
    pub const ALL: [ActivityGroup; 4] = [
        ActivityGroup::Manage,
        ActivityGroup::Read,
        ActivityGroup::Request,
        ActivityGroup::Discuss,
    ];

    pub fn token(self) -> &'static str {
        match self {
            ActivityGroup::Manage => "MANAGE",
            ActivityGroup::Read => "READ",
            ActivityGroup::Request => "REQUEST",
            ActivityGroup::Discuss => "DISCUSS",
        }
    }
}

/// An activity label. Discuss activities always carry their verb; the other
/// groups never do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivityKind {
    Manage,
    Read,
    Request,
    Discuss(DiscussVerb),
}

impl ActivityKind {
    pub fn group(self) -> ActivityGroup {
        match self {
            ActivityKind::Manage => ActivityGroup::Manage,
            ActivityKind::Read => ActivityGroup::Read,
            ActivityKind::Request => ActivityGroup::Request,
            ActivityKind::Discuss(_) => ActivityGroup::Discuss,
        }
    }

    pub fn discuss_verb(self) -> Option<DiscussVerb> {
        match self {
            ActivityKind::Discuss(v) => Some(v),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            ActivityKind::Manage => "MANAGE",
            ActivityKind::Read => "READ",
            ActivityKind::Request => "REQUEST",
            ActivityKind::Discuss(v) => v.token(),
        }
    }
}

/// Task entities of the manage activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Project,
    Meeting,
}

impl TaskKind {
    pub fn token(self) -> &'static str {
        match self {
            TaskKind::Project => "PROJECT",
            TaskKind::Meeting => "MEETING",
        }
    }
}

/// A written artifact: the whole reviewed document or one of its sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactRef {
    Document,
    Section(u32),
}

/// The entity a code acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityRef {
    Task(TaskKind),
    Artifact(ArtifactRef),
    Message { kind: MessageKind, label: u32 },
}

impl EntityRef {
    pub fn kind(self) -> EntityKind {
        match self {
            EntityRef::Task(_) => EntityKind::Task,
            EntityRef::Artifact(_) => EntityKind::Artifact,
            EntityRef::Message { .. } => EntityKind::Message,
        }
    }

    /// Label of a message reference, if this entity is a message.
    pub fn message_label(self) -> Option<(MessageKind, u32)> {
        match self {
            EntityRef::Message { kind, label } => Some((kind, label)),
            _ => None,
        }
    }
}

/// Coarse entity classification used by legality rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Task,
    Artifact,
    Message,
}

impl EntityKind {
    pub fn token(self) -> &'static str {
        match self {
            EntityKind::Task => "TASK",
            EntityKind::Artifact => "ARTIFACT",
            EntityKind::Message => "MESSAGE",
        }
    }
}

/// The optional third level of a code. `Custom` carries scheme-specific
/// criteria declared in a scheme file, stored as the canonical upper-case
/// token.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    Form,
    Content,
    Custom(String),
}

impl Criterion {
    pub fn token(&self) -> &str {
        match self {
            Criterion::Form => "FORM",
            Criterion::Content => "CONTENT",
            Criterion::Custom(t) => t,
        }
    }

    pub(crate) fn from_token(token: &str) -> Criterion {
        match token {
            "FORM" => Criterion::Form,
            "CONTENT" => Criterion::Content,
            other => Criterion::Custom(other.to_string()),
        }
    }
}

/// One parsed activity/entity/criterion label. The optional qualifier is a
/// free-text specialization tag on the discuss verb, preserved verbatim but
/// never interpreted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Code {
    pub activity: ActivityKind,
    pub entity: EntityRef,
    pub criterion: Option<Criterion>,
    pub qualifier: Option<String>,
}

impl Code {
    pub fn new(activity: ActivityKind, entity: EntityRef) -> Code {
        Code {
            activity,
            entity,
            criterion: None,
            qualifier: None,
        }
    }

    pub fn with_criterion(mut self, criterion: Criterion) -> Code {
        self.criterion = Some(criterion);
        self
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_code(self))
    }
}

impl std::str::FromStr for Code {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Code, ParseError> {
        parse_code(s)
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_code(self))
    }
}

/// What an activity group may act on, and whether a criterion may be attached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LegalityRow {
    pub entity_kinds: BTreeSet<EntityKind>,
    pub criterion_allowed: bool,
}

/// A coding scheme: the declared vocabulary plus one legality row per
/// activity group. Legality is total over the declared groups, so every code
/// resolves to exactly one row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingScheme {
    pub name: String,
    pub groups: BTreeSet<ActivityGroup>,
    pub verbs: BTreeSet<DiscussVerb>,
    pub tasks: BTreeSet<TaskKind>,
    pub criteria: BTreeSet<Criterion>,
    pub legality: BTreeMap<ActivityGroup, LegalityRow>,
}

/// The scheme customized for technical review meetings: four activity groups,
/// eight discuss verbs, project/meeting tasks, form/content criteria.
pub fn builtin_trm_scheme() -> CodingScheme {
    let mut legality = BTreeMap::new();
    legality.insert(
        ActivityGroup::Manage,
        LegalityRow {
            entity_kinds: BTreeSet::from([EntityKind::Task]),
            criterion_allowed: false,
        },
    );
    legality.insert(
        ActivityGroup::Read,
        LegalityRow {
            entity_kinds: BTreeSet::from([EntityKind::Artifact]),
            criterion_allowed: false,
        },
    );
    legality.insert(
        ActivityGroup::Request,
        LegalityRow {
            entity_kinds: BTreeSet::from([EntityKind::Artifact, EntityKind::Message]),
            criterion_allowed: false,
        },
    );
    legality.insert(
        ActivityGroup::Discuss,
        LegalityRow {
            entity_kinds: BTreeSet::from([EntityKind::Artifact, EntityKind::Message]),
            criterion_allowed: true,
        },
    );

    CodingScheme {
        name: "TRM".to_string(),
        groups: BTreeSet::from(ActivityGroup::ALL),
        verbs: BTreeSet::from(DiscussVerb::ALL),
        tasks: BTreeSet::from([TaskKind::Project, TaskKind::Meeting]),
        criteria: BTreeSet::from([Criterion::Form, Criterion::Content]),
        legality,
    }
}

/// Which part of a code a violation points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeField {
    Activity,
    Entity,
    Criterion,
}

/// Scheme-level violation kinds. Parse-level problems are `ParseError`s; these
/// arise when a structurally valid code does not fit a particular scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ViolationKind {
    ActivityNotInScheme,
    EntityKindNotAllowed,
    EntityNotInScheme,
    CriterionNotAllowed,
    CriterionNotInScheme,
}

impl ViolationKind {
    pub fn label(self) -> &'static str {
        match self {
            ViolationKind::ActivityNotInScheme => "ActivityNotInScheme",
            ViolationKind::EntityKindNotAllowed => "EntityKindNotAllowed",
            ViolationKind::EntityNotInScheme => "EntityNotInScheme",
            ViolationKind::CriterionNotAllowed => "CriterionNotAllowed",
            ViolationKind::CriterionNotInScheme => "CriterionNotInScheme",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub field: CodeField,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.label(), self.detail)
    }
}

/// Checks a code against a scheme and returns every violation, ordered by
/// violation kind and then by field. An empty list means the code is legal.
pub fn validate_code(code: &Code, scheme: &CodingScheme) -> Vec<Violation> {
    let mut violations = Vec::new();
    let group = code.activity.group();

    if !scheme.groups.contains(&group) {
        violations.push(Violation {
            kind: ViolationKind::ActivityNotInScheme,
            field: CodeField::Activity,
            detail: format!("activity group {} is not declared", group.token()),
        });
    } else if let ActivityKind::Discuss(verb) = code.activity {
        if !scheme.verbs.contains(&verb) {
            violations.push(Violation {
                kind: ViolationKind::ActivityNotInScheme,
                field: CodeField::Activity,
                detail: format!("discuss verb {} is not declared", verb.token()),
            });
        }
    }

    if let Some(row) = scheme.legality.get(&group) {
        if !row.entity_kinds.contains(&code.entity.kind()) {
            violations.push(Violation {
                kind: ViolationKind::EntityKindNotAllowed,
                field: CodeField::Entity,
                detail: format!(
                    "{} entity is not allowed for {}",
                    code.entity.kind().token(),
                    group.token()
                ),
            });
        }
        if code.criterion.is_some() && !row.criterion_allowed {
            violations.push(Violation {
                kind: ViolationKind::CriterionNotAllowed,
                field: CodeField::Criterion,
                detail: format!("criterion is not allowed for {}", group.token()),
            });
        }
    }

    match code.entity {
        EntityRef::Task(task) if !scheme.tasks.contains(&task) => {
            violations.push(Violation {
                kind: ViolationKind::EntityNotInScheme,
                field: CodeField::Entity,
                detail: format!("task {} is not declared", task.token()),
            });
        }
        EntityRef::Message { kind, .. } => {
            let produced = scheme.verbs.iter().any(|v| message_kind_of(*v) == kind);
            if !produced {
                violations.push(Violation {
                    kind: ViolationKind::EntityNotInScheme,
                    field: CodeField::Entity,
                    detail: format!("no declared verb produces {} messages", kind.token()),
                });
            }
        }
        _ => {}
    }

    if let Some(criterion) = &code.criterion {
        if !scheme.criteria.contains(criterion) {
            violations.push(Violation {
                kind: ViolationKind::CriterionNotInScheme,
                field: CodeField::Criterion,
                detail: format!("criterion {} is not declared", criterion.token()),
            });
        }
    }

    violations.sort_by_key(|v| (v.kind, v.field));
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn message_kinds_pair_with_verbs() {
        assert_eq!(
            message_kind_of(DiscussVerb::Evaluate),
            MessageKind::Evaluation
        );
        assert_eq!(
            message_kind_of(DiscussVerb::Hypothesize),
            MessageKind::Hypothesis
        );
        assert_eq!(
            message_kind_of(DiscussVerb::Accept),
            MessageKind::Acceptance
        );
    }

    #[test]
    fn message_kind_bijection_covers_all_eight() {
        let mut images: Vec<MessageKind> = DiscussVerb::ALL
            .iter()
            .map(|v| message_kind_of(*v))
            .collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 8);
        assert_eq!(images, MessageKind::ALL.to_vec());
    }

    #[test]
    fn trm_scheme_shape() {
        let scheme = builtin_trm_scheme();
        assert_eq!(scheme.groups.len(), 4);
        assert_eq!(scheme.verbs.len(), 8);
        assert_eq!(scheme.tasks.len(), 2);
        assert_eq!(scheme.criteria.len(), 2);
        assert!(scheme.legality[&ActivityGroup::Discuss].criterion_allowed);
        for group in [
            ActivityGroup::Manage,
            ActivityGroup::Read,
            ActivityGroup::Request,
        ] {
            assert!(!scheme.legality[&group].criterion_allowed);
        }
    }

    #[test]
    fn validate_accepts_legal_discuss_code() {
        let scheme = builtin_trm_scheme();
        let code = parse_code("DEVELOP/HYPOTHESIS-4").unwrap();
        assert!(validate_code(&code, &scheme).is_empty());
    }

    #[test]
    fn validate_rejects_message_entity_under_read() {
        let scheme = builtin_trm_scheme();
        let code = Code::new(
            ActivityKind::Read,
            EntityRef::Message {
                kind: MessageKind::Evaluation,
                label: 2,
            },
        );
        let violations = validate_code(&code, &scheme);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].kind, ViolationKind::EntityKindNotAllowed);
    }

    #[test]
    fn validate_rejects_criterion_on_manage() {
        let scheme = builtin_trm_scheme();
        let code = Code::new(ActivityKind::Manage, EntityRef::Task(TaskKind::Project))
            .with_criterion(Criterion::Form);
        let violations = validate_code(&code, &scheme);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].kind, ViolationKind::CriterionNotAllowed);
    }

    #[test]
    fn violations_are_ordered_by_kind_then_field() {
        let scheme = builtin_trm_scheme();
        // read on a message with a criterion: two violations in fixed order
        let code = Code::new(
            ActivityKind::Read,
            EntityRef::Message {
                kind: MessageKind::Evaluation,
                label: 1,
            },
        )
        .with_criterion(Criterion::Form);
        let violations = validate_code(&code, &scheme);
        let kinds: Vec<ViolationKind> = violations.iter().map(|v| v.kind).collect();
        let mut sorted = kinds.clone();
        sorted.sort();
        assert_eq!(kinds, sorted);
        assert!(kinds.contains(&ViolationKind::EntityKindNotAllowed));
        assert!(kinds.contains(&ViolationKind::CriterionNotAllowed));
    }
}
