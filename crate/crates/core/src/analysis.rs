//! Descriptive statistics over a protocol: frequency and time distributions
//! per category at two hierarchy levels, and the time split over discussion
//! objects.

use serde::Serialize;

use crate::corpus::Protocol;
use crate::dialogs::{DialogSpan, DialogType};
use crate::scheme::{ActivityGroup, ActivityKind, DiscussVerb, EntityRef, MessageKind};

/// Category hierarchy level for distributions and sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// The four activity groups: MNG, READ, RQST, DCSS.
    Top,
    /// The eight discuss verbs; only discuss episodes participate.
    Discuss,
}

impl Level {
    /// Bucket labels in canonical output order.
    pub fn buckets(self) -> Vec<&'static str> {
        match self {
            Level::Top => vec!["MNG", "READ", "RQST", "DCSS"],
            Level::Discuss => DiscussVerb::ALL.iter().map(|v| v.abbrev()).collect(),
        }
    }

    /// Bucket index of an episode's activity, or `None` if the episode does
    /// not participate at this level.
    pub fn bucket_of(self, activity: ActivityKind) -> Option<usize> {
        match self {
            Level::Top => Some(match activity.group() {
                ActivityGroup::Manage => 0,
                ActivityGroup::Read => 1,
                ActivityGroup::Request => 2,
                ActivityGroup::Discuss => 3,
            }),
            Level::Discuss => activity
                .discuss_verb()
                .map(|v| DiscussVerb::ALL.iter().position(|x| *x == v).unwrap()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Frequency,
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionEntry {
    pub bucket: String,
    pub count: u64,
    pub duration_ms: u64,
    pub proportion: f64,
}

/// An ordered set of buckets with counts, durations, and proportions on one
/// basis. Proportions are computed from exact integer totals in a single
/// final division, so they sum to 1 up to representation error whenever the
/// basis total is non-zero, and are all zero otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub basis: Basis,
    pub population: u64,
    pub entries: Vec<DistributionEntry>,
}

impl Distribution {
    fn from_totals(
        basis: Basis,
        population: u64,
        buckets: Vec<&str>,
        counts: Vec<u64>,
        durations: Vec<u64>,
    ) -> Distribution {
        let total: u64 = match basis {
            Basis::Frequency => counts.iter().sum(),
            Basis::Time => durations.iter().sum(),
        };
        let entries = buckets
            .into_iter()
            .zip(counts.iter().zip(durations.iter()))
            .map(|(bucket, (&count, &duration_ms))| {
                let numerator = match basis {
                    Basis::Frequency => count,
                    Basis::Time => duration_ms,
                };
                DistributionEntry {
                    bucket: bucket.to_string(),
                    count,
                    duration_ms,
                    proportion: if total == 0 {
                        0.0
                    } else {
                        numerator as f64 / total as f64
                    },
                }
            })
            .collect();
        Distribution {
            basis,
            population,
            entries,
        }
    }

    pub fn proportion_of(&self, bucket: &str) -> f64 {
        self.entries
            .iter()
            .find(|e| e.bucket == bucket)
            .map(|e| e.proportion)
            .unwrap_or(0.0)
    }

    pub fn duration_of(&self, bucket: &str) -> u64 {
        self.entries
            .iter()
            .find(|e| e.bucket == bucket)
            .map(|e| e.duration_ms)
            .unwrap_or(0)
    }
}

fn tally(protocol: &Protocol, level: Level) -> (u64, Vec<u64>, Vec<u64>) {
    let buckets = level.buckets();
    let mut counts = vec![0u64; buckets.len()];
    let mut durations = vec![0u64; buckets.len()];
    let mut population = 0u64;
    for episode in &protocol.episodes {
        if let Some(i) = level.bucket_of(episode.code.activity) {
            counts[i] += 1;
            durations[i] += episode.duration_ms();
            population += 1;
        }
    }
    (population, counts, durations)
}

/// Counts episodes per bucket. At the discuss level, non-discuss episodes are
/// ignored and the population shrinks accordingly.
pub fn frequency_distribution(protocol: &Protocol, level: Level) -> Distribution {
    let (population, counts, durations) = tally(protocol, level);
    Distribution::from_totals(
        Basis::Frequency,
        population,
        level.buckets(),
        counts,
        durations,
    )
}

/// Sums episode durations per bucket. Zero-length episodes contribute to
/// counts but not to time.
pub fn time_distribution(protocol: &Protocol, level: Level) -> Distribution {
    let (population, counts, durations) = tally(protocol, level);
    Distribution::from_totals(Basis::Time, population, level.buckets(), counts, durations)
}

/// What an episode is about, for the object-time split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ObjectClass {
    IniSol,
    AltSol,
    Crit,
    Oth,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 4] = [
        ObjectClass::IniSol,
        ObjectClass::AltSol,
        ObjectClass::Crit,
        ObjectClass::Oth,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ObjectClass::IniSol => "INI_SOL",
            ObjectClass::AltSol => "ALT_SOL",
            ObjectClass::Crit => "CRIT",
            ObjectClass::Oth => "OTH",
        }
    }

    fn from_label(label: &str) -> Option<ObjectClass> {
        ObjectClass::ALL.into_iter().find(|c| c.label() == label)
    }
}

/// One classification predicate. Rules are tried in order; the first match
/// decides the class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectPredicate {
    /// Episode is not a discuss episode.
    NonDiscuss,
    /// Discuss episode on an artifact entity.
    Artifact,
    /// Discuss episode on a message whose producing episode lies inside an
    /// ALT dialog span (only decidable when spans are supplied).
    MessageInAlt,
    /// Discuss episode on a message of the given kind.
    MessageKind(MessageKind),
    /// Discuss episode on a message with a criterion attached.
    HasCriterion,
    /// Always matches.
    Default,
}

/// Priority-ordered classification table. The default table sends non-discuss
/// episodes to OTH, discussion of the reviewed artifact to INI_SOL,
/// discussion of developed proposals to ALT_SOL, criterion debates on
/// messages to CRIT, and everything else to OTH.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectRules {
    pub rules: Vec<(ObjectPredicate, ObjectClass)>,
}

impl Default for ObjectRules {
    fn default() -> ObjectRules {
        ObjectRules {
            rules: vec![
                (ObjectPredicate::NonDiscuss, ObjectClass::Oth),
                (ObjectPredicate::Artifact, ObjectClass::IniSol),
                (ObjectPredicate::MessageInAlt, ObjectClass::AltSol),
                (
                    ObjectPredicate::MessageKind(MessageKind::Development),
                    ObjectClass::AltSol,
                ),
                (ObjectPredicate::HasCriterion, ObjectClass::Crit),
                (ObjectPredicate::Default, ObjectClass::Oth),
            ],
        }
    }
}

impl ObjectRules {
    /// Parses a rule list of the form `pred:CLASS, pred:CLASS, ...` where
    /// pred is one of `non_discuss`, `artifact`, `message_in_alt`,
    /// `message_kind=<KIND>`, `has_criterion`, `default`.
    pub fn parse(text: &str) -> Result<ObjectRules, String> {
        let mut rules = Vec::new();
        for item in text.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (pred, class) = item
                .split_once(':')
                .ok_or_else(|| format!("expected `pred:CLASS`, found `{item}`"))?;
            let class = ObjectClass::from_label(class.trim())
                .ok_or_else(|| format!("unknown object class `{}`", class.trim()))?;
            let pred = match pred.trim() {
                "non_discuss" => ObjectPredicate::NonDiscuss,
                "artifact" => ObjectPredicate::Artifact,
                "message_in_alt" => ObjectPredicate::MessageInAlt,
                "has_criterion" => ObjectPredicate::HasCriterion,
                "default" => ObjectPredicate::Default,
                other => match other.strip_prefix("message_kind=") {
                    Some(kind_token) => {
                        let token = kind_token.trim().to_ascii_uppercase();
                        let kind = MessageKind::ALL
                            .into_iter()
                            .find(|k| k.token() == token)
                            .ok_or_else(|| format!("unknown message kind `{token}`"))?;
                        ObjectPredicate::MessageKind(kind)
                    }
                    None => return Err(format!("unknown predicate `{other}`")),
                },
            };
            rules.push((pred, class));
        }
        if rules.is_empty() {
            return Err("object rule list is empty".to_string());
        }
        Ok(ObjectRules { rules })
    }

    fn classify(
        &self,
        protocol: &Protocol,
        episode_index: usize,
        spans: Option<&[DialogSpan]>,
    ) -> ObjectClass {
        let episode = &protocol.episodes[episode_index];
        let is_discuss = episode.code.activity.discuss_verb().is_some();
        for (pred, class) in &self.rules {
            let fires = match pred {
                ObjectPredicate::NonDiscuss => !is_discuss,
                ObjectPredicate::Artifact => {
                    is_discuss && matches!(episode.code.entity, EntityRef::Artifact(_))
                }
                ObjectPredicate::MessageInAlt => {
                    is_discuss
                        && episode
                            .code
                            .entity
                            .message_label()
                            .is_some_and(|(_, label)| {
                                spans.is_some_and(|spans| {
                                    spans.iter().any(|s| {
                                        s.dialog_type == DialogType::Alt
                                            && s.first_id <= label
                                            && label <= s.last_id
                                    })
                                })
                            })
                }
                ObjectPredicate::MessageKind(kind) => {
                    is_discuss
                        && episode
                            .code
                            .entity
                            .message_label()
                            .is_some_and(|(k, _)| k == *kind)
                }
                ObjectPredicate::HasCriterion => {
                    is_discuss
                        && episode.code.entity.message_label().is_some()
                        && episode.code.criterion.is_some()
                }
                ObjectPredicate::Default => true,
            };
            if fires {
                return *class;
            }
        }
        ObjectClass::Oth
    }
}

/// Time distribution over object classes. Classification is total: every
/// episode lands in exactly one class. Without spans, the ALT_SOL rule falls
/// back to the message-kind clause alone.
pub fn object_time_distribution(
    protocol: &Protocol,
    spans: Option<&[DialogSpan]>,
    rules: &ObjectRules,
) -> Distribution {
    let buckets: Vec<&str> = ObjectClass::ALL.iter().map(|c| c.label()).collect();
    let mut counts = vec![0u64; buckets.len()];
    let mut durations = vec![0u64; buckets.len()];
    for i in 0..protocol.episodes.len() {
        let class = rules.classify(protocol, i, spans);
        let slot = ObjectClass::ALL.iter().position(|c| *c == class).unwrap();
        counts[slot] += 1;
        durations[slot] += protocol.episodes[i].duration_ms();
    }
    Distribution::from_totals(
        Basis::Time,
        protocol.episodes.len() as u64,
        buckets,
        counts,
        durations,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_protocol;
    use crate::scheme::builtin_trm_scheme;

    fn protocol_of(codes: &[(&str, u64)]) -> Protocol {
        let mut text = String::from("protocol-tsv v1 t\nparticipants:\tP1\tP2\n");
        let mut at = 0u64;
        for (i, (code, dur)) in codes.iter().enumerate() {
            let speaker = if i % 2 == 0 { "P1" } else { "P2" };
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                i + 1,
                crate::corpus::format_seconds(at),
                crate::corpus::format_seconds(at + dur),
                speaker,
                code
            ));
            at += dur;
        }
        parse_protocol(&text, &builtin_trm_scheme()).unwrap()
    }

    #[test]
    fn top_frequency_counts_by_hand() {
        let p = protocol_of(&[
            ("MANAGE/MEETING", 1000),
            ("READ/SECTION-1", 1000),
            ("INFORM/SECTION-1", 1000),
            ("JUSTIFY/SECTION-1//FORM", 1000),
        ]);
        let d = frequency_distribution(&p, Level::Top);
        assert_eq!(d.population, 4);
        assert_eq!(d.proportion_of("MNG"), 0.25);
        assert_eq!(d.proportion_of("READ"), 0.25);
        assert_eq!(d.proportion_of("RQST"), 0.0);
        assert_eq!(d.proportion_of("DCSS"), 0.5);
    }

    #[test]
    fn empty_protocol_yields_zero_distribution() {
        let p = protocol_of(&[]);
        let d = frequency_distribution(&p, Level::Top);
        assert_eq!(d.population, 0);
        assert!(d.entries.iter().all(|e| e.proportion == 0.0));
    }

    #[test]
    fn discuss_population_equals_top_dcss_count() {
        let p = protocol_of(&[
            ("MANAGE/MEETING", 1000),
            ("INFORM/SECTION-1", 1000),
            ("ACCEPT/SECTION-1", 500),
            ("READ/SECTION-2", 2000),
        ]);
        let top = frequency_distribution(&p, Level::Top);
        let discuss = frequency_distribution(&p, Level::Discuss);
        assert_eq!(
            discuss.population,
            top.entries
                .iter()
                .find(|e| e.bucket == "DCSS")
                .unwrap()
                .count
        );
    }

    #[test]
    fn equal_durations_split_time_evenly() {
        let p = protocol_of(&[("READ/SECTION-1", 3000), ("MANAGE/MEETING", 3000)]);
        let d = time_distribution(&p, Level::Top);
        assert_eq!(d.proportion_of("READ"), 0.5);
        assert_eq!(d.proportion_of("MNG"), 0.5);
    }

    #[test]
    fn zero_length_episodes_count_but_take_no_time() {
        let p = protocol_of(&[("READ/SECTION-1", 0), ("MANAGE/MEETING", 1000)]);
        let freq = frequency_distribution(&p, Level::Top);
        let time = time_distribution(&p, Level::Top);
        assert_eq!(freq.proportion_of("READ"), 0.5);
        assert_eq!(time.proportion_of("READ"), 0.0);
        assert_eq!(time.proportion_of("MNG"), 1.0);
    }

    #[test]
    fn top_time_buckets_conserve_total_duration() {
        let p = protocol_of(&[
            ("MANAGE/MEETING", 777),
            ("READ/SECTION-1", 1234),
            ("REQUEST/SECTION-1", 999),
            ("DEVELOP/SECTION-1", 4567),
        ]);
        let d = time_distribution(&p, Level::Top);
        let total: u64 = d.entries.iter().map(|e| e.duration_ms).sum();
        assert_eq!(total, p.total_coded_duration());
    }

    #[test]
    fn discuss_on_artifact_only_is_all_ini_sol() {
        let p = protocol_of(&[
            ("EVALUATE/SECTION-1//FORM", 1000),
            ("DEVELOP/SECTION-2", 1000),
        ]);
        let d = object_time_distribution(&p, None, &ObjectRules::default());
        assert_eq!(d.proportion_of("INI_SOL"), 1.0);
    }

    #[test]
    fn non_discuss_only_is_all_oth() {
        let p = protocol_of(&[("MANAGE/MEETING", 1000), ("READ/SECTION-1", 1000)]);
        let d = object_time_distribution(&p, None, &ObjectRules::default());
        assert_eq!(d.proportion_of("OTH"), 1.0);
    }

    #[test]
    fn development_messages_classify_as_alt_sol_without_spans() {
        let p = protocol_of(&[
            ("DEVELOP/SECTION-1", 1000),
            ("EVALUATE/DEVELOPMENT-1//CONTENT", 1000),
            ("JUSTIFY/EVALUATION-2//CONTENT", 1000),
            ("ACCEPT/EVALUATION-2", 1000),
        ]);
        let d = object_time_distribution(&p, None, &ObjectRules::default());
        assert_eq!(d.duration_of("ALT_SOL"), 1000); // the develop-message discussion
        assert_eq!(d.duration_of("CRIT"), 1000); // justify with criterion on a message
        assert_eq!(d.duration_of("OTH"), 1000); // plain accept of a message
        assert_eq!(d.duration_of("INI_SOL"), 1000); // develop on the artifact itself
    }

    #[test]
    fn object_classification_is_deterministic() {
        let p = protocol_of(&[
            ("DEVELOP/SECTION-1", 900),
            ("EVALUATE/DEVELOPMENT-1//CONTENT", 1100),
            ("MANAGE/MEETING", 500),
        ]);
        let spans = crate::dialogs::detect_dialogs(&p, &crate::dialogs::DialogRules::default());
        let a = object_time_distribution(&p, Some(&spans), &ObjectRules::default());
        let b = object_time_distribution(&p, Some(&spans), &ObjectRules::default());
        assert_eq!(a, b);
        // classification is total: every episode lands in exactly one class
        let counted: u64 = a.entries.iter().map(|e| e.count).sum();
        assert_eq!(counted, p.episodes.len() as u64);
    }

    #[test]
    fn object_rules_parse_round_trips_default_semantics() {
        let parsed = ObjectRules::parse(
            "non_discuss:OTH, artifact:INI_SOL, message_in_alt:ALT_SOL, message_kind=DEVELOPMENT:ALT_SOL, has_criterion:CRIT, default:OTH",
        )
        .unwrap();
        assert_eq!(parsed, ObjectRules::default());
        assert!(ObjectRules::parse("bogus:OTH").is_err());
        assert!(ObjectRules::parse("artifact:NOPE").is_err());
    }
}
