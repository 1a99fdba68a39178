//! Line-oriented scheme files, for customizing the coding scheme without
//! recompiling. Tokens are the canonical upper-case code tokens.
//!
//! ```text
//! scheme v1 <name>
//! activities: MANAGE, READ, REQUEST, DISCUSS
//! discuss: ACCEPT, DEVELOP, EVALUATE, EXPLAIN, HYPOTHESIZE, INFORM, JUSTIFY, REJECT
//! tasks: PROJECT, MEETING
//! criteria: FORM, CONTENT
//! rule: MANAGE -> TASK
//! rule: DISCUSS -> ARTIFACT, MESSAGE CRITERION
//! ```
//!
//! `#` starts a comment. Criteria may introduce new tokens; activities,
//! verbs, tasks, and entity kinds are restricted to the grammar's vocabulary,
//! since the code parser could never produce anything else.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use super::{
    ActivityGroup, CodingScheme, Criterion, DiscussVerb, EntityKind, LegalityRow, TaskKind,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeFileError {
    #[error("line {line}: syntax error: {detail}")]
    SyntaxError { line: usize, detail: String },
    #[error("line {line}: duplicate declaration of {what}")]
    DuplicateDeclaration { line: usize, what: String },
    #[error("empty activity set: {0}")]
    EmptyActivitySet(String),
    #[error("incomplete legality: no rule for {0}")]
    IncompleteLegality(String),
    #[error("cannot read scheme file: {0}")]
    Io(String),
}

fn syntax(line: usize, detail: impl Into<String>) -> SchemeFileError {
    SchemeFileError::SyntaxError {
        line,
        detail: detail.into(),
    }
}

/// Reads and parses a scheme file.
pub fn load_scheme(path: impl AsRef<Path>) -> Result<CodingScheme, SchemeFileError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| SchemeFileError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_scheme(&text)
}

/// Parses scheme file text. Unknown keys and tokens are errors, not warnings.
pub fn parse_scheme(text: &str) -> Result<CodingScheme, SchemeFileError> {
    let mut name = None;
    let mut groups: Option<(usize, BTreeSet<ActivityGroup>)> = None;
    let mut verbs: Option<(usize, BTreeSet<DiscussVerb>)> = None;
    let mut tasks: Option<(usize, BTreeSet<TaskKind>)> = None;
    let mut criteria: Option<(usize, BTreeSet<Criterion>)> = None;
    let mut legality: BTreeMap<ActivityGroup, (usize, LegalityRow)> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }

        if name.is_none() {
            let rest = line
                .strip_prefix("scheme v1 ")
                .ok_or_else(|| syntax(lineno, "expected `scheme v1 <name>` header"))?;
            if rest.trim().is_empty() {
                return Err(syntax(lineno, "scheme name is empty"));
            }
            name = Some(rest.trim().to_string());
            continue;
        }

        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| syntax(lineno, format!("expected `<key>: ...`, found `{line}`")))?;
        let rest = rest.trim();

        match key.trim() {
            "activities" => {
                if groups.is_some() {
                    return Err(SchemeFileError::DuplicateDeclaration {
                        line: lineno,
                        what: "activities".to_string(),
                    });
                }
                let mut set = BTreeSet::new();
                for token in list_tokens(rest) {
                    let group = ActivityGroup::ALL
                        .into_iter()
                        .find(|g| g.token() == token)
                        .ok_or_else(|| {
                            syntax(lineno, format!("unknown activity group `{token}`"))
                        })?;
                    set.insert(group);
                }
                groups = Some((lineno, set));
            }
            "discuss" => {
                if verbs.is_some() {
                    return Err(SchemeFileError::DuplicateDeclaration {
                        line: lineno,
                        what: "discuss".to_string(),
                    });
                }
                let mut set = BTreeSet::new();
                for token in list_tokens(rest) {
                    let verb = DiscussVerb::ALL
                        .into_iter()
                        .find(|v| v.token() == token)
                        .ok_or_else(|| syntax(lineno, format!("unknown discuss verb `{token}`")))?;
                    set.insert(verb);
                }
                verbs = Some((lineno, set));
            }
            "tasks" => {
                if tasks.is_some() {
                    return Err(SchemeFileError::DuplicateDeclaration {
                        line: lineno,
                        what: "tasks".to_string(),
                    });
                }
                let mut set = BTreeSet::new();
                for token in list_tokens(rest) {
                    let task = [TaskKind::Project, TaskKind::Meeting]
                        .into_iter()
                        .find(|t| t.token() == token)
                        .ok_or_else(|| syntax(lineno, format!("unknown task `{token}`")))?;
                    set.insert(task);
                }
                tasks = Some((lineno, set));
            }
            "criteria" => {
                if criteria.is_some() {
                    return Err(SchemeFileError::DuplicateDeclaration {
                        line: lineno,
                        what: "criteria".to_string(),
                    });
                }
                let mut set = BTreeSet::new();
                for token in list_tokens(rest) {
                    if !token.chars().all(|c| c.is_ascii_alphabetic()) {
                        return Err(syntax(
                            lineno,
                            format!("criterion `{token}` must be alphabetic"),
                        ));
                    }
                    set.insert(Criterion::from_token(&token));
                }
                criteria = Some((lineno, set));
            }
            "rule" => {
                let (group_token, kinds_part) = rest.split_once("->").ok_or_else(|| {
                    syntax(
                        lineno,
                        "expected `rule: <group> -> <entity-kinds> [CRITERION]`",
                    )
                })?;
                let group_token = group_token.trim().to_ascii_uppercase();
                let group = ActivityGroup::ALL
                    .into_iter()
                    .find(|g| g.token() == group_token)
                    .ok_or_else(|| {
                        syntax(lineno, format!("unknown activity group `{group_token}`"))
                    })?;
                if legality.contains_key(&group) {
                    return Err(SchemeFileError::DuplicateDeclaration {
                        line: lineno,
                        what: format!("rule for {}", group.token()),
                    });
                }

                let mut kinds_part = kinds_part.trim().to_string();
                let mut criterion_allowed = false;
                if let Some(stripped) = kinds_part
                    .to_ascii_uppercase()
                    .strip_suffix("CRITERION")
                    .map(|s| kinds_part[..s.len()].trim_end().to_string())
                {
                    kinds_part = stripped;
                    criterion_allowed = true;
                }

                let mut entity_kinds = BTreeSet::new();
                for token in list_tokens(&kinds_part) {
                    let kind = [EntityKind::Task, EntityKind::Artifact, EntityKind::Message]
                        .into_iter()
                        .find(|k| k.token() == token)
                        .ok_or_else(|| syntax(lineno, format!("unknown entity kind `{token}`")))?;
                    entity_kinds.insert(kind);
                }
                if entity_kinds.is_empty() {
                    return Err(syntax(lineno, "rule declares no entity kinds"));
                }
                legality.insert(
                    group,
                    (
                        lineno,
                        LegalityRow {
                            entity_kinds,
                            criterion_allowed,
                        },
                    ),
                );
            }
            other => return Err(syntax(lineno, format!("unknown key `{other}`"))),
        }
    }

    if name.is_none() {
        return Err(syntax(1, "missing `scheme v1 <name>` header"));
    }

    let groups = groups.map(|(_, s)| s).unwrap_or_default();
    let verbs = verbs.map(|(_, s)| s).unwrap_or_default();
    let tasks = tasks.map(|(_, s)| s).unwrap_or_default();
    let criteria = criteria.map(|(_, s)| s).unwrap_or_default();

    if groups.is_empty() {
        return Err(SchemeFileError::EmptyActivitySet(
            "no activity groups declared".to_string(),
        ));
    }
    if groups.contains(&ActivityGroup::Discuss) && verbs.is_empty() {
        return Err(SchemeFileError::EmptyActivitySet(
            "activity group DISCUSS declared with zero verbs".to_string(),
        ));
    }
    if !groups.contains(&ActivityGroup::Discuss) && !verbs.is_empty() {
        return Err(syntax(
            1,
            "discuss verbs declared without the DISCUSS activity group",
        ));
    }

    for group in &groups {
        if !legality.contains_key(group) {
            return Err(SchemeFileError::IncompleteLegality(
                group.token().to_string(),
            ));
        }
    }
    for (group, (lineno, row)) in &legality {
        if !groups.contains(group) {
            return Err(syntax(
                *lineno,
                format!("rule for undeclared activity group {}", group.token()),
            ));
        }
        if row.entity_kinds.contains(&EntityKind::Task) && tasks.is_empty() {
            return Err(SchemeFileError::EmptyActivitySet(format!(
                "rule for {} uses TASK entities but no tasks are declared",
                group.token()
            )));
        }
        if row.criterion_allowed && criteria.is_empty() {
            return Err(SchemeFileError::EmptyActivitySet(format!(
                "rule for {} allows a criterion but no criteria are declared",
                group.token()
            )));
        }
    }

    Ok(CodingScheme {
        name: name.unwrap(),
        groups,
        verbs,
        tasks,
        criteria,
        legality: legality.into_iter().map(|(g, (_, row))| (g, row)).collect(),
    })
}

fn list_tokens(rest: &str) -> impl Iterator<Item = String> + '_ {
    rest.split(',')
        .map(|t| t.trim().to_ascii_uppercase())
        .filter(|t| !t.is_empty())
}
