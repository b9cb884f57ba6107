//! Reports over trace and stats files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lunes_core::engine::EngineStats;
use lunes_core::kv::write_kv;
use lunes_core::trace::{
    corpus_summary, speedup_report, DisseminationAnalyzer, DisseminationReport, IntegrityChecker, IntegrityReport,
    SpeedupReport,
};

use crate::error::{CliError, Result};
use crate::trace_io::TraceReader;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportKind {
    Coverage,
    Messages,
    Delay,
    Speedup,
}

impl FromStr for ReportKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coverage" => Ok(ReportKind::Coverage),
            "messages" => Ok(ReportKind::Messages),
            "delay" => Ok(ReportKind::Delay),
            "speedup" => Ok(ReportKind::Speedup),
            other => Err(CliError::usage(format!(
                "unknown report `{other}` (expected coverage, messages, delay or speedup)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceAnalysis {
    pub path: PathBuf,
    pub report: DisseminationReport,
    pub integrity: IntegrityReport,
}

fn stats_sibling(trace: &Path) -> PathBuf {
    trace.with_extension("stats")
}

pub fn read_stats(path: &Path) -> Result<(String, EngineStats)> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    EngineStats::parse_summary(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// One streaming pass: dissemination metrics and integrity checks together.
pub fn analyze_trace(path: &Path) -> Result<TraceAnalysis> {
    let mut reader = TraceReader::open(path)?;
    let n: usize = reader
        .header_value("n")
        .ok_or_else(|| CliError::usage(format!("{}: header lacks `n`", path.display())))?
        .parse()
        .map_err(|_| CliError::usage(format!("{}: invalid `n` in header", path.display())))?;
    let mut checker = IntegrityChecker::from_header(reader.header().iter().map(|(k, v)| (k.as_str(), v.as_str())));
    let mut analyzer = DisseminationAnalyzer::new(n);
    let mut report_error = None;
    for event in reader.by_ref() {
        let event = event?;
        checker.feed(&event);
        if report_error.is_none() {
            report_error = analyzer.feed(&event).err();
        }
    }
    let integrity = checker.finish();
    if let Some(e) = report_error.filter(|_| integrity.is_clean()) {
        return Err(e.into());
    }
    let mut report = analyzer.finish();
    let sibling = stats_sibling(path);
    if sibling.is_file() {
        report = report.with_control(&read_stats(&sibling)?.1);
    }
    Ok(TraceAnalysis { path: path.to_path_buf(), report, integrity })
}

/// Fails with exit code 3 when any trace has integrity violations.
pub fn require_clean(analyses: &[TraceAnalysis]) -> Result<()> {
    let bad: Vec<String> = analyses
        .iter()
        .filter(|a| !a.integrity.is_clean())
        .map(|a| {
            format!(
                "{}: {} violations, first: {}",
                a.path.display(),
                a.integrity.violations,
                a.integrity.samples.first().map(String::as_str).unwrap_or("?")
            )
        })
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(bad.join("\n")))
    }
}

fn name(path: &Path) -> String {
    path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn render(kind: ReportKind, analyses: &[TraceAnalysis]) -> String {
    let reports: Vec<DisseminationReport> = analyses.iter().map(|a| a.report.clone()).collect();
    let summary = corpus_summary(&reports);
    let mut out = String::new();
    match kind {
        ReportKind::Messages => {
            out.push_str(&write_kv([
                ("graphs", summary.graphs.to_string()),
                ("total_delivered", summary.total_delivered.to_string()),
                ("mean_delivered", format!("{:.3}", summary.mean_delivered)),
                ("mean_duplicates", format!("{:.3}", summary.mean_duplicates)),
            ]));
            out.push_str("trace,messages,delivered,duplicates,control_messages\n");
            for a in analyses {
                let r = &a.report;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    name(&a.path),
                    r.messages,
                    r.delivered,
                    r.duplicates,
                    r.control_messages
                );
            }
        }
        ReportKind::Coverage => {
            out.push_str(&write_kv([
                ("graphs", summary.graphs.to_string()),
                ("mean_coverage", format!("{:.6}", summary.mean_coverage)),
            ]));
            out.push_str("trace,messages,mean_coverage,min_coverage,max_coverage\n");
            for a in analyses {
                let c = &a.report.coverage;
                let min = c.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
                let max = c.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
                let (min, max) = if c.is_empty() { (0.0, 0.0) } else { (min, max) };
                let _ = writeln!(out, "{},{},{:.6},{min:.6},{max:.6}", name(&a.path), c.len(), a.report.mean_coverage);
            }
        }
        ReportKind::Delay => {
            let mut hist: Vec<u64> = Vec::new();
            for r in &reports {
                if hist.len() < r.hop_histogram.len() {
                    hist.resize(r.hop_histogram.len(), 0);
                }
                hist.iter_mut().zip(&r.hop_histogram).for_each(|(a, b)| *a += b);
            }
            let total: u64 = hist.iter().sum();
            let weighted: u64 = hist.iter().enumerate().map(|(h, c)| h as u64 * c).sum();
            let mean = if total == 0 { 0.0 } else { weighted as f64 / total as f64 };
            out.push_str(&write_kv([("graphs", summary.graphs.to_string()), ("mean_hops", format!("{mean:.6}"))]));
            out.push_str("hops,receptions\n");
            for (h, c) in hist.iter().enumerate() {
                let _ = writeln!(out, "{h},{c}");
            }
        }
        ReportKind::Speedup => unreachable!("speedup reports are built from stats files"),
    }
    out
}

pub fn speedup_from_files(paths: &[PathBuf]) -> Result<SpeedupReport> {
    let runs = paths.iter().map(|p| read_stats(p)).collect::<Result<Vec<_>>>()?;
    Ok(speedup_report(&runs)?)
}
