//! Dialog segmentation: partitions an episode stream into REV / ALT / SYNC /
//! MNG spans with nested CONFL sub-spans, and computes the dialog-level time
//! statistics.
//!
//! The detector is deterministic and parameterized by [`DialogRules`]:
//!
//! 1. maximal runs of manage episodes become MNG spans and hard boundaries;
//! 2. every other episode gets a marker class — REV: evaluate/justify/accept,
//!    ALT: develop, SYNC: request/inform/hypothesize/explain; read and reject
//!    are neutral (reject triggers CONFL instead of voting);
//! 3. each marker episode is labeled by a plurality vote over a centered
//!    window of `window` episodes, ties resolved by `tie_priority`; label
//!    changes open new spans;
//! 4. neutral episodes attach to the following span (trailing ones to the
//!    preceding span); a stretch with no markers at all becomes a single SYNC
//!    span flagged degenerate;
//! 5. a reject opens a nested CONFL span, closed inclusively by an accept or
//!    trimmed back to the last reject/evaluate/justify episode once
//!    `confl_break` consecutive episodes outside that set occur.

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{Basis, Distribution, DistributionEntry};
use crate::corpus::{CodedEpisode, Protocol};
use crate::scheme::{ActivityKind, ArtifactRef, DiscussVerb, EntityRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DialogType {
    Rev,
    Alt,
    Sync,
    Confl,
    Mng,
}

impl DialogType {
    /// The four top-level types in canonical output order. CONFL never
    /// appears at the top level.
    pub const TOP_LEVEL: [DialogType; 4] = [
        DialogType::Rev,
        DialogType::Alt,
        DialogType::Sync,
        DialogType::Mng,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DialogType::Rev => "REV",
            DialogType::Alt => "ALT",
            DialogType::Sync => "SYNC",
            DialogType::Confl => "CONFL",
            DialogType::Mng => "MNG",
        }
    }
}

/// A contiguous run of episodes realizing one dialog type. Top-level spans
/// partition the episode ids; `nested` holds CONFL sub-spans and is empty on
/// the sub-spans themselves (nesting depth is at most one).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DialogSpan {
    #[serde(rename = "type")]
    pub dialog_type: DialogType,
    pub first_id: u32,
    pub last_id: u32,
    /// Section index in scope when the span starts; `None` before any
    /// section has been read.
    pub section: Option<u32>,
    pub nested: Vec<DialogSpan>,
    /// Set on the fallback span produced by a stretch with no marker
    /// episodes at all.
    pub degenerate: bool,
}

impl DialogSpan {
    fn new(dialog_type: DialogType, first_id: u32, last_id: u32) -> DialogSpan {
        DialogSpan {
            dialog_type,
            first_id,
            last_id,
            section: None,
            nested: Vec::new(),
            degenerate: false,
        }
    }

    pub fn contains(&self, id: u32) -> bool {
        self.first_id <= id && id <= self.last_id
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RulesError {
    #[error("window must be >= 1")]
    WindowTooSmall,
    #[error("confl_break must be >= 1")]
    BreakTooSmall,
    #[error("tie_priority must be a permutation of REV, ALT, SYNC")]
    BadTiePriority,
}

/// Detector configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DialogRules {
    pub window: usize,
    pub confl_break: usize,
    pub tie_priority: [DialogType; 3],
}

impl Default for DialogRules {
    fn default() -> DialogRules {
        DialogRules {
            window: 5,
            confl_break: 2,
            tie_priority: [DialogType::Rev, DialogType::Alt, DialogType::Sync],
        }
    }
}

impl DialogRules {
    pub fn new(
        window: usize,
        confl_break: usize,
        tie_priority: [DialogType; 3],
    ) -> Result<DialogRules, RulesError> {
        if window < 1 {
            return Err(RulesError::WindowTooSmall);
        }
        if confl_break < 1 {
            return Err(RulesError::BreakTooSmall);
        }
        let mut seen = tie_priority.to_vec();
        seen.sort();
        if seen != vec![DialogType::Rev, DialogType::Alt, DialogType::Sync] {
            return Err(RulesError::BadTiePriority);
        }
        Ok(DialogRules {
            window,
            confl_break,
            tie_priority,
        })
    }
}

/// Marker class of an episode for the plurality vote. `None` is neutral.
fn marker_class(activity: ActivityKind) -> Option<DialogType> {
    match activity {
        ActivityKind::Request => Some(DialogType::Sync),
        ActivityKind::Discuss(verb) => match verb {
            DiscussVerb::Evaluate | DiscussVerb::Justify | DiscussVerb::Accept => {
                Some(DialogType::Rev)
            }
            DiscussVerb::Develop => Some(DialogType::Alt),
            DiscussVerb::Inform | DiscussVerb::Hypothesize | DiscussVerb::Explain => {
                Some(DialogType::Sync)
            }
            DiscussVerb::Reject => None,
        },
        ActivityKind::Read => None,
        ActivityKind::Manage => None,
    }
}

fn is_confl_marker(activity: ActivityKind) -> bool {
    matches!(
        activity.discuss_verb(),
        Some(DiscussVerb::Reject | DiscussVerb::Evaluate | DiscussVerb::Justify)
    )
}

/// Detector instrumentation, used to verify that tie priority only matters
/// when a window vote actually tied.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DetectorTrace {
    /// Episode ids whose window plurality was tied.
    pub tie_ids: Vec<u32>,
}

/// Segments a protocol into top-level dialog spans with nested CONFL spans.
pub fn detect_dialogs(protocol: &Protocol, rules: &DialogRules) -> Vec<DialogSpan> {
    detect_dialogs_traced(protocol, rules).0
}

/// Like [`detect_dialogs`], additionally reporting tie events.
pub fn detect_dialogs_traced(
    protocol: &Protocol,
    rules: &DialogRules,
) -> (Vec<DialogSpan>, DetectorTrace) {
    let episodes = &protocol.episodes;
    let mut spans = Vec::new();
    let mut trace = DetectorTrace::default();

    let mut i = 0;
    while i < episodes.len() {
        if episodes[i].code.activity == ActivityKind::Manage {
            let mut j = i;
            while j < episodes.len() && episodes[j].code.activity == ActivityKind::Manage {
                j += 1;
            }
            spans.push(DialogSpan::new(
                DialogType::Mng,
                episodes[i].id,
                episodes[j - 1].id,
            ));
            i = j;
        } else {
            let mut j = i;
            while j < episodes.len() && episodes[j].code.activity != ActivityKind::Manage {
                j += 1;
            }
            segment_stretch(&episodes[i..j], rules, &mut spans, &mut trace);
            i = j;
        }
    }

    for span in &mut spans {
        span.nested = nested_confl(episodes, span, rules.confl_break);
    }
    assign_sections(episodes, &mut spans);

    (spans, trace)
}

/// Labels one manage-free stretch and appends its spans.
fn segment_stretch(
    stretch: &[CodedEpisode],
    rules: &DialogRules,
    spans: &mut Vec<DialogSpan>,
    trace: &mut DetectorTrace,
) {
    let markers: Vec<Option<DialogType>> = stretch
        .iter()
        .map(|e| marker_class(e.code.activity))
        .collect();

    if markers.iter().all(|m| m.is_none()) {
        let mut span = DialogSpan::new(
            DialogType::Sync,
            stretch[0].id,
            stretch[stretch.len() - 1].id,
        );
        span.degenerate = true;
        spans.push(span);
        return;
    }

    // plurality vote over a centered window; only marker episodes are labeled
    let half_before = (rules.window - 1) / 2;
    let half_after = rules.window / 2;
    let mut labels: Vec<Option<DialogType>> = vec![None; stretch.len()];
    for i in 0..stretch.len() {
        if markers[i].is_none() {
            continue;
        }
        let lo = i.saturating_sub(half_before);
        let hi = (i + half_after).min(stretch.len() - 1);
        let mut votes = [0usize; 3]; // REV, ALT, SYNC
        for m in markers[lo..=hi].iter().flatten() {
            match m {
                DialogType::Rev => votes[0] += 1,
                DialogType::Alt => votes[1] += 1,
                DialogType::Sync => votes[2] += 1,
                _ => unreachable!(),
            }
        }
        let top = *votes.iter().max().unwrap();
        let tied = votes.iter().filter(|v| **v == top).count() > 1;
        if tied {
            trace.tie_ids.push(stretch[i].id);
        }
        let winner = rules
            .tie_priority
            .iter()
            .copied()
            .find(|t| {
                let v = match t {
                    DialogType::Rev => votes[0],
                    DialogType::Alt => votes[1],
                    DialogType::Sync => votes[2],
                    _ => 0,
                };
                v == top
            })
            .unwrap();
        labels[i] = Some(winner);
    }

    // neutral episodes inherit the following label; trailing neutrals the
    // preceding one
    let mut next_label = None;
    for i in (0..stretch.len()).rev() {
        match labels[i] {
            Some(l) => next_label = Some(l),
            None => labels[i] = next_label,
        }
    }
    let mut prev_label = None;
    for label in labels.iter_mut() {
        match *label {
            Some(l) => prev_label = Some(l),
            None => *label = prev_label,
        }
    }

    let mut start = 0;
    for i in 1..=stretch.len() {
        if i == stretch.len() || labels[i] != labels[start] {
            spans.push(DialogSpan::new(
                labels[start].unwrap(),
                stretch[start].id,
                stretch[i - 1].id,
            ));
            start = i;
        }
    }
}

/// Finds nested CONFL spans inside one host span. Sub-spans are pairwise
/// disjoint; a reject inside an open span extends it rather than opening a
/// new one.
fn nested_confl(
    episodes: &[CodedEpisode],
    host: &DialogSpan,
    confl_break: usize,
) -> Vec<DialogSpan> {
    let first = (host.first_id - 1) as usize;
    let last = (host.last_id - 1) as usize;
    let mut nested = Vec::new();

    let mut i = first;
    while i <= last {
        if episodes[i].code.activity.discuss_verb() != Some(DiscussVerb::Reject) {
            i += 1;
            continue;
        }
        let start = i;
        let mut last_marker = i;
        let mut gap = 0;
        let mut end = None;
        let mut j = i + 1;
        while j <= last {
            let activity = episodes[j].code.activity;
            if activity.discuss_verb() == Some(DiscussVerb::Accept) {
                end = Some(j); // agreement closes the conflict, inclusively
                break;
            }
            if is_confl_marker(activity) {
                last_marker = j;
                gap = 0;
            } else {
                gap += 1;
                if gap >= confl_break {
                    break;
                }
            }
            j += 1;
        }
        let end = end.unwrap_or(last_marker);
        nested.push(DialogSpan::new(
            DialogType::Confl,
            episodes[start].id,
            episodes[end].id,
        ));
        i = end + 1;
    }
    nested
}

/// Sets each span's section field to the section in scope at its first
/// episode. Scope opens at every READ/SECTION-n episode.
fn assign_sections(episodes: &[CodedEpisode], spans: &mut [DialogSpan]) {
    let scopes = section_scopes(episodes);
    for span in spans.iter_mut() {
        let scope = scopes[(span.first_id - 1) as usize];
        span.section = (scope != 0).then_some(scope);
        for sub in &mut span.nested {
            let scope = scopes[(sub.first_id - 1) as usize];
            sub.section = (scope != 0).then_some(scope);
        }
    }
}

/// Per-episode section scope; 0 before any section has been read.
fn section_scopes(episodes: &[CodedEpisode]) -> Vec<u32> {
    let mut current = 0u32;
    episodes
        .iter()
        .map(|e| {
            if e.code.activity == ActivityKind::Read {
                if let EntityRef::Artifact(ArtifactRef::Section(n)) = e.code.entity {
                    current = n;
                }
            }
            current
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("spans do not partition the protocol: {0}")]
pub struct SpanMismatch(pub String);

fn check_partition(protocol: &Protocol, spans: &[DialogSpan]) -> Result<(), SpanMismatch> {
    let mut expected = 1u32;
    for span in spans {
        if span.first_id != expected {
            return Err(SpanMismatch(format!(
                "expected a span starting at episode {expected}, found {}",
                span.first_id
            )));
        }
        if span.last_id < span.first_id {
            return Err(SpanMismatch(format!(
                "span {}..{} is inverted",
                span.first_id, span.last_id
            )));
        }
        expected = span.last_id + 1;
    }
    if expected != protocol.episodes.len() as u32 + 1 {
        return Err(SpanMismatch(format!(
            "spans cover episodes up to {}, protocol has {}",
            expected - 1,
            protocol.episodes.len()
        )));
    }
    Ok(())
}

/// Time distribution over the four top-level dialog types. Nested CONFL time
/// stays inside its host's bucket.
pub fn dialog_time_distribution(
    protocol: &Protocol,
    spans: &[DialogSpan],
) -> Result<Distribution, SpanMismatch> {
    check_partition(protocol, spans)?;
    let mut counts = [0u64; 4];
    let mut durations = [0u64; 4];
    for span in spans {
        let slot = DialogType::TOP_LEVEL
            .iter()
            .position(|t| *t == span.dialog_type)
            .expect("top-level span");
        for id in span.first_id..=span.last_id {
            let episode = &protocol.episodes[(id - 1) as usize];
            counts[slot] += 1;
            durations[slot] += episode.duration_ms();
        }
    }
    let total: u64 = durations.iter().sum();
    let entries = DialogType::TOP_LEVEL
        .iter()
        .zip(counts.iter().zip(durations.iter()))
        .map(|(t, (&count, &duration_ms))| DistributionEntry {
            bucket: t.label().to_string(),
            count,
            duration_ms,
            proportion: if total == 0 {
                0.0
            } else {
                duration_ms as f64 / total as f64
            },
        })
        .collect();
    Ok(Distribution {
        basis: Basis::Time,
        population: protocol.episodes.len() as u64,
        entries,
    })
}

/// Share of time spent in nested CONFL spans, per host type and overall.
/// Hosts with zero total time report zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConflShare {
    pub per_host: Vec<(DialogType, f64)>,
    pub overall: f64,
}

impl ConflShare {
    pub fn of_host(&self, host: DialogType) -> f64 {
        self.per_host
            .iter()
            .find(|(t, _)| *t == host)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }
}

pub fn confl_share_within(protocol: &Protocol, spans: &[DialogSpan]) -> ConflShare {
    let mut host_time = [0u64; 4];
    let mut confl_time = [0u64; 4];
    for span in spans {
        let slot = DialogType::TOP_LEVEL
            .iter()
            .position(|t| *t == span.dialog_type)
            .expect("top-level span");
        for id in span.first_id..=span.last_id {
            host_time[slot] += protocol.episodes[(id - 1) as usize].duration_ms();
        }
        for sub in &span.nested {
            for id in sub.first_id..=sub.last_id {
                confl_time[slot] += protocol.episodes[(id - 1) as usize].duration_ms();
            }
        }
    }
    let per_host = DialogType::TOP_LEVEL
        .iter()
        .enumerate()
        .map(|(slot, t)| {
            let share = if host_time[slot] == 0 {
                0.0
            } else {
                confl_time[slot] as f64 / host_time[slot] as f64
            };
            (*t, share)
        })
        .collect();
    let total_host: u64 = host_time.iter().sum();
    let total_confl: u64 = confl_time.iter().sum();
    ConflShare {
        per_host,
        overall: if total_host == 0 {
            0.0
        } else {
            total_confl as f64 / total_host as f64
        },
    }
}

/// One row of the per-section dialog duration table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionRow {
    pub section: u32,
    pub rev_ms: u64,
    pub alt_ms: u64,
    pub sync_ms: u64,
    pub mng_ms: u64,
}

/// Dialog time per document section. Scope opens at each READ/SECTION-n
/// episode and closes at the next one; episodes before any read fall into
/// section 0. Durations are attributed through each episode's containing
/// top-level span type.
pub fn section_dialog_durations(protocol: &Protocol, spans: &[DialogSpan]) -> Vec<SectionRow> {
    let scopes = section_scopes(&protocol.episodes);
    let mut table: std::collections::BTreeMap<u32, [u64; 4]> = std::collections::BTreeMap::new();
    for span in spans {
        let slot = DialogType::TOP_LEVEL
            .iter()
            .position(|t| *t == span.dialog_type)
            .expect("top-level span");
        for id in span.first_id..=span.last_id {
            let idx = (id - 1) as usize;
            let row = table.entry(scopes[idx]).or_default();
            row[slot] += protocol.episodes[idx].duration_ms();
        }
    }
    table
        .into_iter()
        .map(|(section, d)| SectionRow {
            section,
            rev_ms: d[0],
            alt_ms: d[1],
            sync_ms: d[2],
            mng_ms: d[3],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_protocol;
    use crate::scheme::builtin_trm_scheme;

    fn protocol_of(codes: &[&str]) -> Protocol {
        let mut text = String::from("protocol-tsv v1 t\nparticipants:\tP1\tP2\n");
        for (i, code) in codes.iter().enumerate() {
            let speaker = if i % 2 == 0 { "P1" } else { "P2" };
            text.push_str(&format!(
                "{}\t{}.000\t{}.000\t{}\t{}\n",
                i + 1,
                i,
                i + 1,
                speaker,
                code
            ));
        }
        parse_protocol(&text, &builtin_trm_scheme()).unwrap()
    }

    fn types_of(spans: &[DialogSpan]) -> Vec<(DialogType, u32, u32)> {
        spans
            .iter()
            .map(|s| (s.dialog_type, s.first_id, s.last_id))
            .collect()
    }

    #[test]
    fn request_inform_hypothesize_is_one_sync_span() {
        let p = protocol_of(&[
            "REQUEST/SECTION-1",
            "INFORM/SECTION-1",
            "HYPOTHESIZE/SECTION-1",
            "INFORM/SECTION-1",
        ]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        assert_eq!(types_of(&spans), vec![(DialogType::Sync, 1, 4)]);
    }

    #[test]
    fn evaluate_justify_cycles_are_one_rev_span() {
        let p = protocol_of(&[
            "EVALUATE/SECTION-1//CONTENT",
            "JUSTIFY/EVALUATION-1//CONTENT",
            "EVALUATE/SECTION-1//FORM",
            "JUSTIFY/EVALUATION-3//FORM",
            "ACCEPT/EVALUATION-3",
        ]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        assert_eq!(types_of(&spans), vec![(DialogType::Rev, 1, 5)]);
        assert!(spans[0].nested.is_empty());
    }

    #[test]
    fn manage_runs_become_mng_spans() {
        let p = protocol_of(&["MANAGE/MEETING", "MANAGE/PROJECT"]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        assert_eq!(types_of(&spans), vec![(DialogType::Mng, 1, 2)]);
    }

    #[test]
    fn reject_through_accept_becomes_nested_confl() {
        let p = protocol_of(&[
            "EVALUATE/SECTION-1//CONTENT",
            "JUSTIFY/EVALUATION-1//CONTENT",
            "REJECT/EVALUATION-1//CONTENT",
            "JUSTIFY/EVALUATION-1//CONTENT",
            "EVALUATE/SECTION-1//CONTENT",
            "ACCEPT/EVALUATION-5",
        ]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        assert_eq!(types_of(&spans), vec![(DialogType::Rev, 1, 6)]);
        assert_eq!(types_of(&spans[0].nested), vec![(DialogType::Confl, 3, 6)]);
    }

    #[test]
    fn confl_is_trimmed_after_break_of_non_markers() {
        let p = protocol_of(&[
            "INFORM/SECTION-1",
            "INFORM/SECTION-1",
            "REJECT/INFORMATION-1//CONTENT",
            "JUSTIFY/INFORMATION-2//CONTENT",
            "INFORM/SECTION-1",
            "INFORM/SECTION-1",
            "HYPOTHESIZE/SECTION-1",
        ]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].dialog_type, DialogType::Sync);
        assert_eq!(types_of(&spans[0].nested), vec![(DialogType::Confl, 3, 4)]);
    }

    #[test]
    fn read_only_protocol_is_one_degenerate_sync_span() {
        let p = protocol_of(&["READ/SECTION-1", "READ/SECTION-2"]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].dialog_type, DialogType::Sync);
        assert!(spans[0].degenerate);
    }

    #[test]
    fn read_episodes_attach_to_the_following_span() {
        let p = protocol_of(&[
            "EVALUATE/SECTION-1//CONTENT",
            "JUSTIFY/EVALUATION-1//CONTENT",
            "EVALUATE/SECTION-1//FORM",
            "READ/SECTION-2",
            "DEVELOP/SECTION-2",
            "DEVELOP/SECTION-2",
            "DEVELOP/SECTION-2",
        ]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        assert_eq!(
            types_of(&spans),
            vec![(DialogType::Rev, 1, 3), (DialogType::Alt, 4, 7)]
        );
        // no section had been read when the REV span started
        assert_eq!(spans[0].section, None);
        assert_eq!(spans[1].section, Some(2));
    }

    #[test]
    fn spans_partition_and_distribution_conserves_time() {
        let p = protocol_of(&[
            "MANAGE/MEETING",
            "READ/SECTION-1",
            "INFORM/SECTION-1",
            "REQUEST/SECTION-1",
            "INFORM/SECTION-1",
            "EVALUATE/SECTION-1//CONTENT",
            "JUSTIFY/EVALUATION-6//CONTENT",
            "EVALUATE/SECTION-1//FORM",
            "MANAGE/PROJECT",
        ]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        let d = dialog_time_distribution(&p, &spans).unwrap();
        let total: u64 = d.entries.iter().map(|e| e.duration_ms).sum();
        assert_eq!(total, p.total_coded_duration());
        let sum: f64 = d.entries.iter().map(|e| e.proportion).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_rev_span_takes_all_the_time() {
        let p = protocol_of(&[
            "EVALUATE/SECTION-1//CONTENT",
            "JUSTIFY/EVALUATION-1//CONTENT",
        ]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        let d = dialog_time_distribution(&p, &spans).unwrap();
        assert_eq!(d.proportion_of("REV"), 1.0);
    }

    #[test]
    fn mng_only_protocol_is_all_mng_time() {
        let p = protocol_of(&["MANAGE/MEETING", "MANAGE/PROJECT", "MANAGE/MEETING"]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        let d = dialog_time_distribution(&p, &spans).unwrap();
        assert_eq!(d.proportion_of("MNG"), 1.0);
    }

    #[test]
    fn span_mismatch_is_reported() {
        let p = protocol_of(&["MANAGE/MEETING", "MANAGE/PROJECT"]);
        let bogus = vec![DialogSpan::new(DialogType::Mng, 1, 1)];
        assert!(dialog_time_distribution(&p, &bogus).is_err());
    }

    #[test]
    fn no_rejects_means_zero_confl_share() {
        let p = protocol_of(&["INFORM/SECTION-1", "INFORM/SECTION-1", "EXPLAIN/SECTION-1"]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        let share = confl_share_within(&p, &spans);
        assert_eq!(share.overall, 0.0);
        assert!(share.per_host.iter().all(|(_, p)| *p == 0.0));
    }

    #[test]
    fn fully_nested_host_reports_share_one() {
        let p = protocol_of(&[
            "REJECT/SECTION-1//CONTENT",
            "JUSTIFY/SECTION-1//CONTENT",
            "EVALUATE/SECTION-1//CONTENT",
        ]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        assert_eq!(types_of(&spans), vec![(DialogType::Rev, 1, 3)]);
        let share = confl_share_within(&p, &spans);
        assert_eq!(share.of_host(DialogType::Rev), 1.0);
        assert_eq!(share.overall, 1.0);
    }

    #[test]
    fn no_section_reads_fall_into_section_zero() {
        let p = protocol_of(&["INFORM/DOCUMENT", "EXPLAIN/DOCUMENT"]);
        let spans = detect_dialogs(&p, &DialogRules::default());
        let rows = section_dialog_durations(&p, &spans);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].section, 0);
        assert_eq!(rows[0].sync_ms, 2000);
    }

    #[test]
    fn rule_construction_rejects_bad_parameters() {
        assert!(DialogRules::new(0, 2, DialogRules::default().tie_priority).is_err());
        assert!(DialogRules::new(5, 0, DialogRules::default().tie_priority).is_err());
        assert!(DialogRules::new(
            5,
            2,
            [DialogType::Rev, DialogType::Rev, DialogType::Sync]
        )
        .is_err());
        assert!(DialogRules::new(
            1,
            1,
            [DialogType::Sync, DialogType::Rev, DialogType::Alt]
        )
        .is_ok());
    }

    #[test]
    fn detector_is_deterministic() {
        let p = protocol_of(&[
            "MANAGE/MEETING",
            "READ/SECTION-1",
            "INFORM/SECTION-1",
            "REJECT/INFORMATION-3//FORM",
            "EVALUATE/SECTION-1//FORM",
            "INFORM/SECTION-1",
            "INFORM/SECTION-1",
            "DEVELOP/SECTION-1",
            "DEVELOP/SECTION-1",
            "DEVELOP/SECTION-1",
        ]);
        let a = detect_dialogs(&p, &DialogRules::default());
        let b = detect_dialogs(&p, &DialogRules::default());
        assert_eq!(a, b);
    }
}
