//! Command-line front end: validate / lint / stats / dialogs / lsa / report
//! over protocol files, emitting TSV, JSON, or SVG.
//!
//! Exit codes: 0 on success, 1 when the protocol fails validation or
//! referential integrity (every violation is printed to the error stream),
//! 2 on usage errors (bad flags, unreadable scheme or config files, invalid
//! lag or alpha). Data goes to the output stream, diagnostics to the error
//! stream; identical arguments, input bytes, and seed produce identical
//! output bytes.

mod config;
mod report;
mod svg;

pub use config::{load_overrides, parse_overrides, Overrides};

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use dialog_lens_core::analysis::{
    frequency_distribution, object_time_distribution, time_distribution, Level,
};
use dialog_lens_core::corpus::{
    check_referential_integrity, lint_segmentation, load_protocol, LoadError, Protocol,
};
use dialog_lens_core::dialogs::{
    confl_share_within, detect_dialogs, dialog_time_distribution, section_dialog_durations,
};
use dialog_lens_core::scheme::{builtin_trm_scheme, load_scheme, CodingScheme};
use dialog_lens_core::seqstats::{
    extract_dialog_sequence, extract_sequence, lsa, pattern_graph, permutation_pvalue,
};
use report::ConfigEcho;
use svg::SvgDoc;

/// Environment variable naming the default scheme file.
pub const SCHEME_ENV: &str = "DIALOG_LENS_SCHEME";

const ANALYSES_HELP: &str = "\
Analyses and the invocations that produce them:
  activity frequency distribution        stats --level top --basis freq
  frequency distribution within discuss  stats --level discuss --basis freq
  activity time distribution             stats --level top --basis time
  time distribution within discuss       stats --level discuss --basis time
  time distribution over objects         stats --objects
  dialog time distribution               dialogs
  conflict-resolution share per dialog   dialogs
  dialog time per document section       dialogs --sections
  succession significance (lag analysis) lsa --lag 1 --alpha 0.05
  the full bundle                        report --format tsv|json|svg";

#[derive(Parser)]
#[command(
    name = "dialog-lens",
    version,
    about = "Analyzes coded transcripts of technical review meetings",
    after_help = ANALYSES_HELP
)]
struct Cli {
    /// Scheme file; defaults to $DIALOG_LENS_SCHEME, then the built-in TRM
    /// scheme.
    #[arg(long, global = true)]
    scheme: Option<PathBuf>,

    /// Optional key=value file overriding dialog and object rules.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Top,
    Discuss,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeqLevelArg {
    Top,
    Discuss,
    Dialog,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    Freq,
    Time,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Tsv,
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Load a protocol, validate every code, and check message references.
    Validate { protocol: PathBuf },
    /// Report merge-candidate warnings (adjacent same-speaker same-code
    /// episodes).
    Lint { protocol: PathBuf },
    /// Frequency/time distributions per category, or the object time split.
    Stats {
        #[arg(long, value_enum, default_value = "top", conflicts_with = "objects")]
        level: LevelArg,
        #[arg(long, value_enum, default_value = "freq", conflicts_with = "objects")]
        basis: BasisArg,
        /// Classify episodes by discussion object instead.
        #[arg(long)]
        objects: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: FormatArg,
        protocol: PathBuf,
    },
    /// Segment the protocol into dialogs; optionally the per-section table.
    Dialogs {
        /// Emit the per-section dialog duration table instead of spans.
        #[arg(long)]
        sections: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: FormatArg,
        protocol: PathBuf,
    },
    /// Lag sequential analysis over the category sequence.
    Lsa {
        #[arg(long, value_enum, default_value = "top")]
        level: SeqLevelArg,
        #[arg(long, default_value_t = 1)]
        lag: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Also compute a permutation p-value per pair with this many
        /// iterations (exact enumeration when feasible).
        #[arg(long, value_name = "ITERATIONS")]
        oracle: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Drop self-transitions (a -> a) from the output.
        #[arg(long)]
        no_self: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: FormatArg,
        protocol: PathBuf,
    },
    /// Everything at once: distributions, dialogs, sections, lag analysis,
    /// integrity and lint results.
    Report {
        #[arg(long, value_enum, default_value = "tsv")]
        format: FormatArg,
        #[arg(long, value_enum, default_value = "top")]
        level: SeqLevelArg,
        #[arg(long, default_value_t = 1)]
        lag: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        protocol: PathBuf,
    },
}

enum Failure {
    /// Validation or integrity failure: exit 1.
    Data(Vec<String>),
    /// Usage or configuration failure: exit 2.
    Usage(String),
}

impl Failure {
    fn data(msg: impl Into<String>) -> Failure {
        Failure::Data(vec![msg.into()])
    }
}

/// Runs the CLI against explicit streams and returns the process exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                return 2;
            }
            // --help / --version
            let _ = write!(out, "{rendered}");
            return 0;
        }
    };

    match dispatch(&cli, out, err) {
        Ok(()) => 0,
        Err(Failure::Data(messages)) => {
            for m in messages {
                let _ = writeln!(err, "{m}");
            }
            1
        }
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "{message}");
            2
        }
    }
}

fn resolve_scheme(cli: &Cli) -> Result<(CodingScheme, String), Failure> {
    let path = cli
        .scheme
        .clone()
        .or_else(|| std::env::var_os(SCHEME_ENV).map(PathBuf::from));
    match path {
        Some(p) => {
            let scheme = load_scheme(&p).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok((scheme, p.display().to_string()))
        }
        None => Ok((builtin_trm_scheme(), "builtin:TRM".to_string())),
    }
}

fn resolve_overrides(cli: &Cli) -> Result<Overrides, Failure> {
    match &cli.config {
        Some(p) => load_overrides(p).map_err(Failure::Usage),
        None => Ok(Overrides::default()),
    }
}

fn load(path: &Path, scheme: &CodingScheme) -> Result<Protocol, Failure> {
    load_protocol(path, scheme).map_err(|e| match e {
        LoadError::Io(_) => Failure::data(e.to_string()),
        LoadError::Invalid(violations) => {
            Failure::Data(violations.iter().map(|v| v.to_string()).collect())
        }
    })
}

fn json_out<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Usage(format!("serialization failed: {e}")))?;
    writeln!(out, "{text}").map_err(|e| Failure::Usage(e.to_string()))
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let (scheme, scheme_name) = resolve_scheme(cli)?;
    let overrides = resolve_overrides(cli)?;
    let io = |e: std::io::Error| Failure::Usage(e.to_string());

    match &cli.command {
        Command::Validate { protocol } => {
            let p = load(protocol, &scheme)?;
            let integrity = check_referential_integrity(&p);
            if !integrity.is_clean() {
                return Err(Failure::Data(
                    integrity.violations.iter().map(|v| v.to_string()).collect(),
                ));
            }
            writeln!(out, "{} episodes OK", p.episodes.len()).map_err(io)?;
            Ok(())
        }

        Command::Lint { protocol } => {
            let p = load(protocol, &scheme)?;
            let warnings = lint_segmentation(&p);
            writeln!(out, "first_id\tsecond_id\tspeaker\tcode").map_err(io)?;
            for w in &warnings {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    w.first_id, w.second_id, w.speaker, w.code
                )
                .map_err(io)?;
            }
            let _ = writeln!(err, "{} merge candidate(s)", warnings.len());
            Ok(())
        }

        Command::Stats {
            level,
            basis,
            objects,
            format,
            protocol,
        } => {
            let p = load(protocol, &scheme)?;
            let (title, d) = if *objects {
                let spans = detect_dialogs(&p, &overrides.dialog_rules);
                (
                    "Time distribution over discussion objects",
                    object_time_distribution(&p, Some(&spans), &overrides.object_rules),
                )
            } else {
                let level = match level {
                    LevelArg::Top => Level::Top,
                    LevelArg::Discuss => Level::Discuss,
                };
                match basis {
                    BasisArg::Freq => ("Frequency distribution", frequency_distribution(&p, level)),
                    BasisArg::Time => ("Time distribution", time_distribution(&p, level)),
                }
            };
            match format {
                FormatArg::Tsv => report::write_distribution_tsv(out, &d).map_err(io),
                FormatArg::Json => json_out(out, &d),
                FormatArg::Svg => {
                    let mut doc = SvgDoc::new();
                    if *objects {
                        report::distribution_pie(&mut doc, title, &d);
                    } else {
                        report::distribution_bars(&mut doc, title, &d);
                    }
                    out.write_all(doc.finish().as_bytes()).map_err(io)
                }
            }
        }

        Command::Dialogs {
            sections,
            format,
            protocol,
        } => {
            let p = load(protocol, &scheme)?;
            let spans = detect_dialogs(&p, &overrides.dialog_rules);
            if *sections {
                let rows = section_dialog_durations(&p, &spans);
                return match format {
                    FormatArg::Tsv => report::write_sections_tsv(out, &rows).map_err(io),
                    FormatArg::Json => json_out(out, &rows),
                    FormatArg::Svg => {
                        let mut doc = SvgDoc::new();
                        report::section_bars(&mut doc, &rows);
                        out.write_all(doc.finish().as_bytes()).map_err(io)
                    }
                };
            }
            let time =
                dialog_time_distribution(&p, &spans).map_err(|e| Failure::Usage(e.to_string()))?;
            let confl = report::ConflShareDoc::from(&confl_share_within(&p, &spans));
            match format {
                FormatArg::Tsv => {
                    writeln!(out, "# spans").map_err(io)?;
                    report::write_spans_tsv(out, &spans).map_err(io)?;
                    writeln!(out, "# dialog-time").map_err(io)?;
                    report::write_distribution_tsv(out, &time).map_err(io)?;
                    writeln!(out, "# confl-share").map_err(io)?;
                    report::write_confl_tsv(out, &confl).map_err(io)
                }
                FormatArg::Json => {
                    #[derive(serde::Serialize)]
                    struct DialogsDoc<'a> {
                        spans: &'a [dialog_lens_core::dialogs::DialogSpan],
                        dialog_time: &'a dialog_lens_core::analysis::Distribution,
                        confl_share: &'a report::ConflShareDoc,
                    }
                    json_out(
                        out,
                        &DialogsDoc {
                            spans: &spans,
                            dialog_time: &time,
                            confl_share: &confl,
                        },
                    )
                }
                FormatArg::Svg => {
                    let mut doc = SvgDoc::new();
                    report::distribution_pie(&mut doc, "Dialog time distribution", &time);
                    report::confl_bars(&mut doc, &confl);
                    out.write_all(doc.finish().as_bytes()).map_err(io)
                }
            }
        }

        Command::Lsa {
            level,
            lag,
            alpha,
            oracle,
            seed,
            no_self,
            format,
            protocol,
        } => {
            let p = load(protocol, &scheme)?;
            let seq = match level {
                SeqLevelArg::Top => extract_sequence(&p, Level::Top),
                SeqLevelArg::Discuss => extract_sequence(&p, Level::Discuss),
                SeqLevelArg::Dialog => {
                    let spans = detect_dialogs(&p, &overrides.dialog_rules);
                    extract_dialog_sequence(&spans)
                }
            };
            let mut findings =
                lsa(&seq, *lag, *alpha).map_err(|e| Failure::Usage(e.to_string()))?;
            if *no_self {
                findings.retain(|f| f.given != f.target);
            }
            let graph = pattern_graph(&findings);
            let pvalues: Option<Vec<f64>> = match oracle {
                Some(iterations) => Some(
                    findings
                        .iter()
                        .map(|f| {
                            permutation_pvalue(&seq, &f.given, &f.target, *lag, *iterations, *seed)
                                .map_err(|e| Failure::Usage(e.to_string()))
                        })
                        .collect::<Result<_, _>>()?,
                ),
                None => None,
            };
            match format {
                FormatArg::Tsv => {
                    report::write_findings_tsv(out, &findings, pvalues.as_deref()).map_err(io)?;
                    report::write_chains_tsv(out, &graph).map_err(io)
                }
                FormatArg::Json => {
                    #[derive(serde::Serialize)]
                    struct LsaDoc<'a> {
                        level: &'a str,
                        lag: usize,
                        alpha: f64,
                        findings: &'a [dialog_lens_core::seqstats::LsaFinding],
                        graph: &'a dialog_lens_core::seqstats::PatternGraph,
                        #[serde(skip_serializing_if = "Option::is_none")]
                        permutation_pvalues: Option<&'a [f64]>,
                    }
                    let level = match level {
                        SeqLevelArg::Top => "top",
                        SeqLevelArg::Discuss => "discuss",
                        SeqLevelArg::Dialog => "dialog",
                    };
                    json_out(
                        out,
                        &LsaDoc {
                            level,
                            lag: *lag,
                            alpha: *alpha,
                            findings: &findings,
                            graph: &graph,
                            permutation_pvalues: pvalues.as_deref(),
                        },
                    )
                }
                FormatArg::Svg => {
                    let mut doc = SvgDoc::new();
                    report::lsa_chart(
                        &mut doc,
                        &report::LsaSection {
                            level: "".to_string(),
                            lag: *lag,
                            alpha: *alpha,
                            findings,
                            graph,
                        },
                    );
                    out.write_all(doc.finish().as_bytes()).map_err(io)
                }
            }
        }

        Command::Report {
            format,
            level,
            lag,
            alpha,
            seed,
            protocol,
        } => {
            let p = load(protocol, &scheme)?;
            let echo = ConfigEcho {
                protocol: protocol.display().to_string(),
                scheme: scheme_name,
                config: cli.config.as_ref().map(|c| c.display().to_string()),
                dialog_window: overrides.dialog_rules.window,
                dialog_confl_break: overrides.dialog_rules.confl_break,
                dialog_tie_priority: overrides
                    .dialog_rules
                    .tie_priority
                    .iter()
                    .map(|t| t.label().to_string())
                    .collect(),
                lag: *lag,
                alpha: *alpha,
                seed: *seed,
            };
            let doc = report::build_report(&p, &overrides, echo, *level)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            match format {
                FormatArg::Tsv => report::write_report_tsv(out, &doc).map_err(io),
                FormatArg::Json => json_out(out, &doc),
                FormatArg::Svg => report::write_report_svg(out, &doc).map_err(io),
            }
        }
    }
}
