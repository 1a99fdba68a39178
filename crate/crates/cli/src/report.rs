//! Report assembly and rendering: one bundle carrying every analysis the
//! tool produces, serializable as TSV blocks, JSON, or stacked SVG charts.

use std::io::Write;

use dialog_lens_core::analysis::{
    frequency_distribution, object_time_distribution, time_distribution, Distribution, Level,
};
use dialog_lens_core::corpus::{
    check_referential_integrity, lint_segmentation, IntegrityViolation, LintWarning, Protocol,
};
use dialog_lens_core::dialogs::{
    confl_share_within, detect_dialogs, dialog_time_distribution, section_dialog_durations,
    ConflShare, DialogSpan, DialogType, SectionRow,
};
use dialog_lens_core::seqstats::{
    extract_dialog_sequence, extract_sequence, lsa, pattern_graph, LsaFinding, PatternGraph,
    SeqError,
};
use serde::Serialize;

use crate::config::Overrides;
use crate::svg::SvgDoc;

/// Echo of the resolved run configuration, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub protocol: String,
    pub scheme: String,
    pub config: Option<String>,
    pub dialog_window: usize,
    pub dialog_confl_break: usize,
    pub dialog_tie_priority: Vec<String>,
    pub lag: usize,
    pub alpha: f64,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct LsaSection {
    pub level: String,
    pub lag: usize,
    pub alpha: f64,
    pub findings: Vec<LsaFinding>,
    pub graph: PatternGraph,
}

/// The full analysis bundle for one protocol.
#[derive(Serialize)]
pub struct Report {
    pub tool_version: &'static str,
    pub config: ConfigEcho,
    pub meeting_id: String,
    pub participants: Vec<String>,
    pub episodes: usize,
    pub total_coded_duration_ms: u64,
    pub integrity: Vec<IntegrityViolation>,
    pub lints: Vec<LintWarning>,
    pub frequency_top: Distribution,
    pub frequency_discuss: Distribution,
    pub time_top: Distribution,
    pub time_discuss: Distribution,
    pub object_time: Distribution,
    pub dialog_spans: Vec<DialogSpan>,
    pub dialog_time: Distribution,
    pub confl_share: ConflShareDoc,
    pub section_durations: Vec<SectionRow>,
    pub lsa: LsaSection,
}

#[derive(Serialize)]
pub struct ConflShareDoc {
    pub rev: f64,
    pub alt: f64,
    pub sync: f64,
    pub mng: f64,
    pub overall: f64,
}

impl From<&ConflShare> for ConflShareDoc {
    fn from(s: &ConflShare) -> ConflShareDoc {
        ConflShareDoc {
            rev: s.of_host(DialogType::Rev),
            alt: s.of_host(DialogType::Alt),
            sync: s.of_host(DialogType::Sync),
            mng: s.of_host(DialogType::Mng),
            overall: s.overall,
        }
    }
}

pub fn build_report(
    protocol: &Protocol,
    overrides: &Overrides,
    config: ConfigEcho,
    level: crate::SeqLevelArg,
) -> Result<Report, SeqError> {
    let spans = detect_dialogs(protocol, &overrides.dialog_rules);
    let dialog_time = dialog_time_distribution(protocol, &spans).expect("detector spans partition");
    let confl = confl_share_within(protocol, &spans);
    let sections = section_dialog_durations(protocol, &spans);

    let (level_name, seq) = match level {
        crate::SeqLevelArg::Top => ("top", extract_sequence(protocol, Level::Top)),
        crate::SeqLevelArg::Discuss => ("discuss", extract_sequence(protocol, Level::Discuss)),
        crate::SeqLevelArg::Dialog => ("dialog", extract_dialog_sequence(&spans)),
    };
    let findings = match lsa(&seq, config.lag, config.alpha) {
        Ok(f) => f,
        // short sequences carry no lag structure; the report stays usable
        Err(SeqError::LagTooLarge { .. }) => Vec::new(),
        Err(e) => return Err(e),
    };
    let graph = pattern_graph(&findings);
    let (lag, alpha) = (config.lag, config.alpha);

    Ok(Report {
        tool_version: env!("CARGO_PKG_VERSION"),
        config,
        meeting_id: protocol.meeting_id.clone(),
        participants: protocol.participants.clone(),
        episodes: protocol.episodes.len(),
        total_coded_duration_ms: protocol.total_coded_duration(),
        integrity: check_referential_integrity(protocol).violations,
        lints: lint_segmentation(protocol),
        frequency_top: frequency_distribution(protocol, Level::Top),
        frequency_discuss: frequency_distribution(protocol, Level::Discuss),
        time_top: time_distribution(protocol, Level::Top),
        time_discuss: time_distribution(protocol, Level::Discuss),
        object_time: object_time_distribution(protocol, Some(&spans), &overrides.object_rules),
        dialog_spans: spans,
        dialog_time,
        confl_share: ConflShareDoc::from(&confl),
        section_durations: sections,
        lsa: LsaSection {
            level: level_name.to_string(),
            lag,
            alpha,
            findings,
            graph,
        },
    })
}

// ------------------------------------------------------------------ TSV

pub fn write_distribution_tsv(out: &mut dyn Write, d: &Distribution) -> std::io::Result<()> {
    writeln!(out, "bucket\tcount\tduration_ms\tproportion")?;
    for e in &d.entries {
        writeln!(
            out,
            "{}\t{}\t{}\t{:.6}",
            e.bucket, e.count, e.duration_ms, e.proportion
        )?;
    }
    Ok(())
}

pub fn write_spans_tsv(out: &mut dyn Write, spans: &[DialogSpan]) -> std::io::Result<()> {
    writeln!(out, "type\tfirst_id\tlast_id\tsection\tdegenerate")?;
    let fmt_section = |s: Option<u32>| s.map(|n| n.to_string()).unwrap_or_else(|| "-".to_string());
    for span in spans {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            span.dialog_type.label(),
            span.first_id,
            span.last_id,
            fmt_section(span.section),
            span.degenerate
        )?;
        for sub in &span.nested {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                sub.dialog_type.label(),
                sub.first_id,
                sub.last_id,
                fmt_section(sub.section),
                sub.degenerate
            )?;
        }
    }
    Ok(())
}

pub fn write_confl_tsv(out: &mut dyn Write, confl: &ConflShareDoc) -> std::io::Result<()> {
    writeln!(out, "host\tshare")?;
    writeln!(out, "REV\t{:.6}", confl.rev)?;
    writeln!(out, "ALT\t{:.6}", confl.alt)?;
    writeln!(out, "SYNC\t{:.6}", confl.sync)?;
    writeln!(out, "MNG\t{:.6}", confl.mng)?;
    writeln!(out, "OVERALL\t{:.6}", confl.overall)
}

pub fn write_sections_tsv(out: &mut dyn Write, rows: &[SectionRow]) -> std::io::Result<()> {
    writeln!(out, "section\trev_ms\talt_ms\tsync_ms\tmng_ms")?;
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.section, r.rev_ms, r.alt_ms, r.sync_ms, r.mng_ms
        )?;
    }
    Ok(())
}

pub fn write_findings_tsv(
    out: &mut dyn Write,
    findings: &[LsaFinding],
    oracle: Option<&[f64]>,
) -> std::io::Result<()> {
    write!(
        out,
        "given\ttarget\tlag\tobserved\texpected\tz\tsignificant\tdegenerate"
    )?;
    writeln!(out, "{}", if oracle.is_some() { "\tp_perm" } else { "" })?;
    for (i, f) in findings.iter().enumerate() {
        let z =
            f.z.map(|z| format!("{z:.6}"))
                .unwrap_or_else(|| "-".to_string());
        write!(
            out,
            "{}\t{}\t{}\t{}\t{:.6}\t{}\t{}\t{}",
            f.given, f.target, f.lag, f.observed, f.expected, z, f.significant, f.degenerate
        )?;
        match oracle {
            Some(ps) => writeln!(out, "\t{:.6}", ps[i])?,
            None => writeln!(out)?,
        }
    }
    Ok(())
}

pub fn write_chains_tsv(out: &mut dyn Write, graph: &PatternGraph) -> std::io::Result<()> {
    writeln!(out, "# chains")?;
    for chain in &graph.chains {
        writeln!(out, "{}", chain.join("->"))?;
    }
    Ok(())
}

pub fn write_report_tsv(out: &mut dyn Write, report: &Report) -> std::io::Result<()> {
    writeln!(out, "# report")?;
    writeln!(out, "tool_version\t{}", report.tool_version)?;
    writeln!(out, "meeting_id\t{}", report.meeting_id)?;
    writeln!(out, "participants\t{}", report.participants.join(","))?;
    writeln!(out, "episodes\t{}", report.episodes)?;
    writeln!(
        out,
        "total_coded_duration_ms\t{}",
        report.total_coded_duration_ms
    )?;
    writeln!(out, "# config")?;
    writeln!(out, "protocol\t{}", report.config.protocol)?;
    writeln!(out, "scheme\t{}", report.config.scheme)?;
    if let Some(c) = &report.config.config {
        writeln!(out, "config\t{c}")?;
    }
    writeln!(out, "dialog.window\t{}", report.config.dialog_window)?;
    writeln!(
        out,
        "dialog.confl_break\t{}",
        report.config.dialog_confl_break
    )?;
    writeln!(
        out,
        "dialog.tie_priority\t{}",
        report.config.dialog_tie_priority.join(",")
    )?;
    writeln!(out, "lag\t{}", report.config.lag)?;
    writeln!(out, "alpha\t{}", report.config.alpha)?;
    writeln!(out, "seed\t{}", report.config.seed)?;

    writeln!(out, "# integrity")?;
    writeln!(out, "episode_id\tkind\tdetail")?;
    for v in &report.integrity {
        writeln!(out, "{}\t{}\t{}", v.episode_id, v.kind.label(), v.detail)?;
    }
    writeln!(out, "# lints")?;
    writeln!(out, "first_id\tsecond_id\tspeaker\tcode")?;
    for w in &report.lints {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            w.first_id, w.second_id, w.speaker, w.code
        )?;
    }

    writeln!(out, "# frequency-top")?;
    write_distribution_tsv(out, &report.frequency_top)?;
    writeln!(out, "# frequency-discuss")?;
    write_distribution_tsv(out, &report.frequency_discuss)?;
    writeln!(out, "# time-top")?;
    write_distribution_tsv(out, &report.time_top)?;
    writeln!(out, "# time-discuss")?;
    write_distribution_tsv(out, &report.time_discuss)?;
    writeln!(out, "# object-time")?;
    write_distribution_tsv(out, &report.object_time)?;

    writeln!(out, "# spans")?;
    write_spans_tsv(out, &report.dialog_spans)?;
    writeln!(out, "# dialog-time")?;
    write_distribution_tsv(out, &report.dialog_time)?;
    writeln!(out, "# confl-share")?;
    write_confl_tsv(out, &report.confl_share)?;
    writeln!(out, "# sections")?;
    write_sections_tsv(out, &report.section_durations)?;

    writeln!(
        out,
        "# lsa level={} lag={} alpha={}",
        report.lsa.level, report.lsa.lag, report.lsa.alpha
    )?;
    write_findings_tsv(out, &report.lsa.findings, None)?;
    write_chains_tsv(out, &report.lsa.graph)
}

// ------------------------------------------------------------------ SVG

pub fn distribution_bars(doc: &mut SvgDoc, title: &str, d: &Distribution) {
    let rows: Vec<(String, f64, String)> = d
        .entries
        .iter()
        .map(|e| {
            (
                e.bucket.clone(),
                e.proportion,
                format!("{:.1}% (n={})", e.proportion * 100.0, e.count),
            )
        })
        .collect();
    doc.bar_chart(title, &rows);
}

pub fn distribution_pie(doc: &mut SvgDoc, title: &str, d: &Distribution) {
    let rows: Vec<(String, f64)> = d
        .entries
        .iter()
        .map(|e| (e.bucket.clone(), e.proportion))
        .collect();
    doc.pie_chart(title, &rows);
}

pub fn confl_bars(doc: &mut SvgDoc, confl: &ConflShareDoc) {
    let rows = vec![
        (
            "REV".to_string(),
            confl.rev,
            format!("{:.1}%", confl.rev * 100.0),
        ),
        (
            "ALT".to_string(),
            confl.alt,
            format!("{:.1}%", confl.alt * 100.0),
        ),
        (
            "SYNC".to_string(),
            confl.sync,
            format!("{:.1}%", confl.sync * 100.0),
        ),
        (
            "MNG".to_string(),
            confl.mng,
            format!("{:.1}%", confl.mng * 100.0),
        ),
        (
            "OVERALL".to_string(),
            confl.overall,
            format!("{:.1}%", confl.overall * 100.0),
        ),
    ];
    doc.bar_chart("Conflict-resolution share of dialog time", &rows);
}

pub fn section_bars(doc: &mut SvgDoc, rows: &[SectionRow]) {
    let series = ["REV", "ALT", "SYNC", "MNG"];
    let data: Vec<(String, Vec<f64>)> = rows
        .iter()
        .map(|r| {
            (
                format!("section {}", r.section),
                vec![
                    r.rev_ms as f64 / 1000.0,
                    r.alt_ms as f64 / 1000.0,
                    r.sync_ms as f64 / 1000.0,
                    r.mng_ms as f64 / 1000.0,
                ],
            )
        })
        .collect();
    doc.grouped_bars("Dialog time per section (seconds)", &series, &data);
}

pub fn lsa_chart(doc: &mut SvgDoc, lsa: &LsaSection) {
    let rows: Vec<(String, f64, String)> = lsa
        .findings
        .iter()
        .filter(|f| f.significant)
        .map(|f| {
            let z = f.z.unwrap_or(0.0);
            (
                format!("{}->{}", f.given, f.target),
                z.abs(),
                format!("z={z:.2}"),
            )
        })
        .collect();
    doc.bar_chart(
        &format!(
            "Significant successions at lag {} (alpha {})",
            lsa.lag, lsa.alpha
        ),
        &rows,
    );
    let chains: Vec<String> = lsa.graph.chains.iter().map(|c| c.join(" -> ")).collect();
    doc.text_block("Succession chains", &chains);
}

pub fn write_report_svg(out: &mut dyn Write, report: &Report) -> std::io::Result<()> {
    let mut doc = SvgDoc::new();
    distribution_bars(
        &mut doc,
        "Activity frequency distribution",
        &report.frequency_top,
    );
    distribution_bars(
        &mut doc,
        "Frequency distribution within discussion",
        &report.frequency_discuss,
    );
    distribution_bars(&mut doc, "Activity time distribution", &report.time_top);
    distribution_bars(
        &mut doc,
        "Time distribution within discussion",
        &report.time_discuss,
    );
    distribution_pie(
        &mut doc,
        "Time distribution over discussion objects",
        &report.object_time,
    );
    distribution_pie(&mut doc, "Dialog time distribution", &report.dialog_time);
    confl_bars(&mut doc, &report.confl_share);
    section_bars(&mut doc, &report.section_durations);
    lsa_chart(&mut doc, &report.lsa);
    out.write_all(doc.finish().as_bytes())
}
