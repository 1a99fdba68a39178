//! Core library for analyzing coded transcripts of technical review
//! meetings: a structured code grammar with a customizable coding scheme,
//! validated protocol ingestion, category distributions, dialog
//! segmentation, and lag sequential analysis.
//!
//! Everything is immutable after construction and all operations are pure,
//! so values can be shared freely across threads.
//!
//! ```
//! use dialog_lens_core::{
//!     builtin_trm_scheme, detect_dialogs, parse_protocol, time_distribution,
//!     DialogRules, DialogType, Level,
//! };
//!
//! let text = "protocol-tsv v1 demo\n\
//!             participants:\tP1\tP2\n\
//!             1\t0.000\t6.000\tP1\tREAD/SECTION-1\n\
//!             2\t6.000\t9.000\tP2\tEVALUATE/SECTION-1//CONTENT\n\
//!             3\t9.000\t14.500\tP1\tJUSTIFY/EVALUATION-2//CONTENT\n\
//!             4\t14.500\t15.000\tP2\tACCEPT/EVALUATION-2\n";
//! let protocol = parse_protocol(text, &builtin_trm_scheme())?;
//!
//! let time = time_distribution(&protocol, Level::Top);
//! assert_eq!(time.duration_of("READ"), 6_000);
//!
//! let spans = detect_dialogs(&protocol, &DialogRules::default());
//! assert_eq!(spans.len(), 1);
//! assert_eq!(spans[0].dialog_type, DialogType::Rev);
//! # Ok::<(), dialog_lens_core::LoadError>(())
//! ```

pub mod analysis;
pub mod corpus;
pub mod dialogs;
pub mod scheme;
pub mod seqstats;

pub use analysis::{
    frequency_distribution, object_time_distribution, time_distribution, Basis, Distribution,
    DistributionEntry, Level, ObjectClass, ObjectRules,
};
pub use corpus::{
    check_referential_integrity, lint_segmentation, load_protocol, parse_protocol, CodedEpisode,
    IntegrityReport, LintWarning, LoadError, Protocol,
};
pub use dialogs::{
    confl_share_within, detect_dialogs, dialog_time_distribution, section_dialog_durations,
    ConflShare, DialogRules, DialogSpan, DialogType, SectionRow,
};
pub use scheme::{
    builtin_trm_scheme, format_code, load_scheme, message_kind_of, parse_code, validate_code,
    ActivityGroup, ActivityKind, ArtifactRef, Code, CodingScheme, Criterion, DiscussVerb,
    EntityKind, EntityRef, MessageKind, ParseError, TaskKind, Violation,
};
pub use seqstats::{
    extract_dialog_sequence, extract_sequence, lsa, pattern_graph, permutation_pvalue,
    transition_counts, CategorySequence, LagTable, LsaFinding, PatternGraph, SeqError,
};
