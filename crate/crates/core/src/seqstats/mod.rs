//! Lag sequential analysis over category sequences: observed and expected
//! transition counts at a given lag, adjusted residuals against the
//! independence model, a permutation-test oracle, and extraction of
//! significant succession patterns.

mod graph;
mod normal;
mod permutation;

pub use graph::{pattern_graph, PatternEdge, PatternGraph};
pub use normal::{normal_quantile, two_sided_critical_value};
pub use permutation::permutation_pvalue;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::Level;
use crate::corpus::Protocol;
use crate::dialogs::DialogSpan;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeqError {
    #[error("lag {lag} is too large for a sequence of length {len}")]
    LagTooLarge { lag: usize, len: usize },
    #[error("significance level {0} is outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("label `{0}` is not in the alphabet")]
    UnknownLabel(String),
}

/// An ordered sequence of category labels over a fixed, finite alphabet.
/// The alphabet may contain labels that never occur, so tables keep a row
/// and column for every bucket of the chosen level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorySequence {
    alphabet: Vec<String>,
    symbols: Vec<usize>,
}

impl CategorySequence {
    /// Builds a sequence whose alphabet is the sorted set of observed labels.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> CategorySequence {
        let mut alphabet: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect();
        alphabet.sort();
        alphabet.dedup();
        let symbols = labels
            .iter()
            .map(|l| alphabet.iter().position(|a| a == l.as_ref()).unwrap())
            .collect();
        CategorySequence { alphabet, symbols }
    }

    /// Builds a sequence over an explicit alphabet; every label must belong
    /// to it.
    pub fn with_alphabet<S: AsRef<str>>(
        alphabet: Vec<String>,
        labels: &[S],
    ) -> Result<CategorySequence, SeqError> {
        let symbols = labels
            .iter()
            .map(|l| {
                alphabet
                    .iter()
                    .position(|a| a == l.as_ref())
                    .ok_or_else(|| SeqError::UnknownLabel(l.as_ref().to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(CategorySequence { alphabet, symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(|&s| self.alphabet[s].as_str())
    }

    pub(crate) fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub(crate) fn index_of(&self, label: &str) -> Result<usize, SeqError> {
        self.alphabet
            .iter()
            .position(|a| a == label)
            .ok_or_else(|| SeqError::UnknownLabel(label.to_string()))
    }
}

/// Projects a protocol onto one label per qualifying episode, in id order.
/// At the discuss level, non-discuss episodes are skipped.
pub fn extract_sequence(protocol: &Protocol, level: Level) -> CategorySequence {
    let alphabet: Vec<String> = level.buckets().into_iter().map(String::from).collect();
    let symbols = protocol
        .episodes
        .iter()
        .filter_map(|e| level.bucket_of(e.code.activity))
        .collect();
    CategorySequence { alphabet, symbols }
}

/// One label per top-level dialog span, in order.
pub fn extract_dialog_sequence(spans: &[DialogSpan]) -> CategorySequence {
    let alphabet: Vec<String> = crate::dialogs::DialogType::TOP_LEVEL
        .iter()
        .map(|t| t.label().to_string())
        .collect();
    let symbols = spans
        .iter()
        .map(|s| {
            crate::dialogs::DialogType::TOP_LEVEL
                .iter()
                .position(|t| *t == s.dialog_type)
                .expect("top-level span")
        })
        .collect();
    CategorySequence { alphabet, symbols }
}

/// Transition table at lag `k`: for every ordered label pair `(a, b)`, how
/// often `b` occurs exactly `k` positions after `a`. Expected counts and
/// adjusted residuals are derived from position-restricted marginals:
/// `prefix_counts[a]` counts `a` among the first `N-k` positions (possible
/// givens) and `suffix_counts[b]` counts `b` among the last `N-k` positions
/// (possible targets), so marginal sums are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagTable {
    pub lag: usize,
    pub alphabet: Vec<String>,
    pub observed: Vec<Vec<u64>>,
    pub prefix_counts: Vec<u64>,
    pub suffix_counts: Vec<u64>,
    pub valid_positions: usize,
}

impl LagTable {
    /// Expected count under independence: `n_a' * n_b'' / (N - k)`.
    pub fn expected(&self, a: usize, b: usize) -> f64 {
        (self.prefix_counts[a] * self.suffix_counts[b]) as f64 / self.valid_positions as f64
    }

    /// Adjusted residual `(O - E) / sqrt(E (1 - n_a'/(N-k)) (1 - n_b''/(N-k)))`.
    /// `None` when the expected count or a variance factor is zero.
    pub fn residual(&self, a: usize, b: usize) -> Option<f64> {
        let n = self.valid_positions as f64;
        let expected = self.expected(a, b);
        let var = expected
            * (1.0 - self.prefix_counts[a] as f64 / n)
            * (1.0 - self.suffix_counts[b] as f64 / n);
        if var <= 0.0 {
            return None;
        }
        Some((self.observed[a][b] as f64 - expected) / var.sqrt())
    }

    pub fn expected_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.alphabet.len())
            .map(|a| {
                (0..self.alphabet.len())
                    .map(|b| self.expected(a, b))
                    .collect()
            })
            .collect()
    }

    pub fn residual_matrix(&self) -> Vec<Vec<Option<f64>>> {
        (0..self.alphabet.len())
            .map(|a| {
                (0..self.alphabet.len())
                    .map(|b| self.residual(a, b))
                    .collect()
            })
            .collect()
    }
}

/// Counts lag-`k` transitions. `k` must satisfy `1 <= k < N`.
pub fn transition_counts(seq: &CategorySequence, k: usize) -> Result<LagTable, SeqError> {
    if k == 0 || k >= seq.len() {
        return Err(SeqError::LagTooLarge {
            lag: k,
            len: seq.len(),
        });
    }
    let m = seq.alphabet.len();
    let mut observed = vec![vec![0u64; m]; m];
    let mut prefix_counts = vec![0u64; m];
    let mut suffix_counts = vec![0u64; m];
    let n = seq.len();
    for i in 0..n - k {
        observed[seq.symbols[i]][seq.symbols[i + k]] += 1;
        prefix_counts[seq.symbols[i]] += 1;
        suffix_counts[seq.symbols[i + k]] += 1;
    }
    Ok(LagTable {
        lag: k,
        alphabet: seq.alphabet.clone(),
        observed,
        prefix_counts,
        suffix_counts,
        valid_positions: n - k,
    })
}

/// One tested succession `given -> target` at a lag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LsaFinding {
    pub given: String,
    pub target: String,
    pub lag: usize,
    pub observed: u64,
    pub expected: f64,
    /// Adjusted residual; `None` when the cell is degenerate.
    pub z: Option<f64>,
    pub significant: bool,
    pub degenerate: bool,
}

/// Runs the lag-sequential test for every ordered label pair (self
/// transitions included). A pair is significant when its adjusted residual
/// reaches the two-sided normal critical value for `alpha`; degenerate cells
/// (zero expectation or zero variance) are never significant.
pub fn lsa(seq: &CategorySequence, k: usize, alpha: f64) -> Result<Vec<LsaFinding>, SeqError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SeqError::InvalidAlpha(alpha));
    }
    let table = transition_counts(seq, k)?;
    let critical = two_sided_critical_value(alpha);
    let mut findings = Vec::new();
    for a in 0..table.alphabet.len() {
        for b in 0..table.alphabet.len() {
            let z = table.residual(a, b);
            findings.push(LsaFinding {
                given: table.alphabet[a].clone(),
                target: table.alphabet[b].clone(),
                lag: k,
                observed: table.observed[a][b],
                expected: table.expected(a, b),
                z,
                significant: z.map(|z| z.abs() >= critical).unwrap_or(false),
                degenerate: z.is_none(),
            });
        }
    }
    Ok(findings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_protocol;
    use crate::scheme::builtin_trm_scheme;

    fn seq_of(s: &str) -> CategorySequence {
        let labels: Vec<String> = s.chars().map(|c| c.to_string()).collect();
        CategorySequence::from_labels(&labels)
    }

    fn protocol_of(codes: &[&str]) -> crate::corpus::Protocol {
        let mut text = String::from("protocol-tsv v1 t\nparticipants:\tP1\tP2\n");
        for (i, code) in codes.iter().enumerate() {
            text.push_str(&format!(
                "{}\t{}.000\t{}.000\tP{}\t{}\n",
                i + 1,
                i,
                i + 1,
                i % 2 + 1,
                code
            ));
        }
        parse_protocol(&text, &builtin_trm_scheme()).unwrap()
    }

    #[test]
    fn top_level_extraction_projects_activity_groups() {
        let p = protocol_of(&[
            "MANAGE/MEETING",
            "READ/SECTION-1",
            "INFORM/SECTION-1",
            "JUSTIFY/SECTION-1//FORM",
        ]);
        let seq = extract_sequence(&p, Level::Top);
        let labels: Vec<&str> = seq.labels().collect();
        assert_eq!(labels, vec!["MNG", "READ", "DCSS", "DCSS"]);
        assert_eq!(seq.alphabet(), ["MNG", "READ", "RQST", "DCSS"]);
    }

    #[test]
    fn discuss_level_extraction_filters_non_discuss_episodes() {
        let p = protocol_of(&[
            "MANAGE/MEETING",
            "READ/SECTION-1",
            "INFORM/SECTION-1",
            "JUSTIFY/SECTION-1//FORM",
        ]);
        let seq = extract_sequence(&p, Level::Discuss);
        let labels: Vec<&str> = seq.labels().collect();
        assert_eq!(labels, vec!["INF", "JUST"]);
    }

    #[test]
    fn empty_protocol_extracts_an_empty_sequence() {
        let p = protocol_of(&[]);
        assert!(extract_sequence(&p, Level::Top).is_empty());
        assert!(extract_sequence(&p, Level::Discuss).is_empty());
    }

    #[test]
    fn dialog_extraction_yields_one_label_per_span() {
        let p = protocol_of(&[
            "MANAGE/MEETING",
            "INFORM/SECTION-1",
            "REQUEST/SECTION-1",
            "INFORM/SECTION-1",
            "DEVELOP/SECTION-1",
            "DEVELOP/SECTION-1",
            "DEVELOP/SECTION-1",
        ]);
        let spans = crate::dialogs::detect_dialogs(&p, &crate::dialogs::DialogRules::default());
        let seq = extract_dialog_sequence(&spans);
        let labels: Vec<&str> = seq.labels().collect();
        assert_eq!(labels, vec!["MNG", "SYNC", "ALT"]);
    }

    #[test]
    fn lag_one_counts_enumerated_by_hand() {
        // ABABABAB has 7 adjacent pairs: AB BA AB BA AB BA AB
        let t = transition_counts(&seq_of("ABABABAB"), 1).unwrap();
        let a = 0;
        let b = 1;
        assert_eq!(t.observed[a][b], 4);
        assert_eq!(t.observed[b][a], 3);
        assert_eq!(t.observed[a][a], 0);
        assert_eq!(t.observed[b][b], 0);
        assert_eq!(t.valid_positions, 7);
    }

    #[test]
    fn lag_two_counts_enumerated_by_hand() {
        // 6 lag-2 pairs: AA BB AA BB AA BB
        let t = transition_counts(&seq_of("ABABABAB"), 2).unwrap();
        assert_eq!(t.observed[0][0], 3);
        assert_eq!(t.observed[1][1], 3);
        assert_eq!(t.observed[0][1], 0);
        assert_eq!(t.observed[1][0], 0);
    }

    #[test]
    fn constant_sequence_counts_self_transitions() {
        let t = transition_counts(&seq_of("AAAA"), 1).unwrap();
        assert_eq!(t.observed[0][0], 3);
    }

    #[test]
    fn lag_at_or_beyond_length_is_rejected() {
        assert!(matches!(
            transition_counts(&seq_of("AAAA"), 4),
            Err(SeqError::LagTooLarge { .. })
        ));
        assert!(matches!(
            transition_counts(&seq_of("AAAA"), 0),
            Err(SeqError::LagTooLarge { .. })
        ));
    }

    #[test]
    fn marginal_sums_match_position_restricted_counts() {
        let t = transition_counts(&seq_of("ABBABAABBA"), 2).unwrap();
        for a in 0..2 {
            let row: u64 = t.observed[a].iter().sum();
            assert_eq!(row, t.prefix_counts[a]);
            let col: u64 = (0..2).map(|x| t.observed[x][a]).sum();
            assert_eq!(col, t.suffix_counts[a]);
        }
        let total: u64 = t.observed.iter().flatten().sum();
        assert_eq!(total, t.valid_positions as u64);
    }

    #[test]
    fn alternating_sequence_z_matches_hand_derivation() {
        // O = 4, E = 16/7, variance factors (3/7)^2; z = sqrt(7)
        let findings = lsa(&seq_of("ABABABAB"), 1, 0.05).unwrap();
        let ab = findings
            .iter()
            .find(|f| f.given == "A" && f.target == "B")
            .unwrap();
        assert_eq!(ab.observed, 4);
        assert!((ab.expected - 16.0 / 7.0).abs() < 1e-12);
        let z = ab.z.unwrap();
        assert!((z - 7f64.sqrt()).abs() < 1e-12);
        assert!((z - 2.65).abs() < 0.01);
        assert!(ab.significant);
    }

    #[test]
    fn single_symbol_sequence_is_degenerate() {
        let findings = lsa(&seq_of("AAAA"), 1, 0.05).unwrap();
        assert_eq!(findings.len(), 1);
        assert!(findings[0].degenerate);
        assert!(!findings[0].significant);
        assert!(findings[0].z.is_none());
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        assert!(matches!(
            lsa(&seq_of("ABAB"), 1, 0.0),
            Err(SeqError::InvalidAlpha(_))
        ));
        assert!(matches!(
            lsa(&seq_of("ABAB"), 1, 1.0),
            Err(SeqError::InvalidAlpha(_))
        ));
    }

    #[test]
    fn expected_counts_sum_to_valid_positions_exactly() {
        // rational identity: sum_ab n_a' n_b'' = (N-k)^2
        let t = transition_counts(&seq_of("ABCCBAACBBACBCA"), 3).unwrap();
        let lhs: u128 = (0..t.alphabet.len())
            .flat_map(|a| (0..t.alphabet.len()).map(move |b| (a, b)))
            .map(|(a, b)| t.prefix_counts[a] as u128 * t.suffix_counts[b] as u128)
            .sum();
        assert_eq!(lhs, (t.valid_positions as u128).pow(2));
    }

    #[test]
    fn unused_alphabet_labels_keep_their_rows() {
        let seq = CategorySequence::with_alphabet(
            vec!["A".into(), "B".into(), "C".into()],
            &["A", "B", "A", "B"],
        )
        .unwrap();
        let t = transition_counts(&seq, 1).unwrap();
        assert_eq!(t.alphabet.len(), 3);
        assert_eq!(t.prefix_counts[2], 0);
        let findings = lsa(&seq, 1, 0.05).unwrap();
        assert_eq!(findings.len(), 9);
        assert!(findings
            .iter()
            .filter(|f| f.given == "C" || f.target == "C")
            .all(|f| f.degenerate));
    }
}
