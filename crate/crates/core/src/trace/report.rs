use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;
use core::hash::BuildHasherDefault;

use hashbrown::HashMap;
use rustc_hash::FxHasher;
use thiserror::Error;

use super::{MsgId, TraceEvent};
use crate::engine::EngineStats;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("input error: {0}")]
    Input(String),
}

#[derive(Clone, Copy, Debug)]
struct MsgTally {
    receivers: u32,
}

/// Streaming accumulator behind [`DisseminationReport`].
#[derive(Debug)]
pub struct DisseminationAnalyzer {
    n: usize,
    tallies: HashMap<MsgId, MsgTally, BuildHasherDefault<FxHasher>>,
    delivered: u64,
    duplicates: u64,
    hop_histogram: Vec<u64>,
}

impl DisseminationAnalyzer {
    pub fn new(n: usize) -> Self {
        Self { n, tallies: HashMap::default(), delivered: 0, duplicates: 0, hop_histogram: Vec::new() }
    }

    pub fn feed(&mut self, event: &TraceEvent) -> Result<(), ReportError> {
        match *event {
            TraceEvent::Generate { msg, .. } => {
                if self.tallies.insert(msg, MsgTally { receivers: 0 }).is_some() {
                    return Err(ReportError::Integrity(format!("message {msg} generated twice")));
                }
            }
            TraceEvent::Receive { msg, hops, .. } => {
                let tally = self
                    .tallies
                    .get_mut(&msg)
                    .ok_or_else(|| ReportError::Integrity(format!("R for unknown message {msg}")))?;
                tally.receivers += 1;
                self.delivered += 1;
                let h = hops as usize;
                if self.hop_histogram.len() <= h {
                    self.hop_histogram.resize(h + 1, 0);
                }
                self.hop_histogram[h] += 1;
            }
            TraceEvent::Duplicate { msg, .. } => {
                if !self.tallies.contains_key(&msg) {
                    return Err(ReportError::Integrity(format!("D for unknown message {msg}")));
                }
                self.duplicates += 1;
            }
            TraceEvent::Send { .. } | TraceEvent::Migrate { .. } => {}
        }
        Ok(())
    }

    pub fn finish(self) -> DisseminationReport {
        let denom = self.n.saturating_sub(1).max(1) as f64;
        let mut coverage: Vec<(MsgId, f64)> =
            self.tallies.iter().map(|(&m, t)| (m, t.receivers as f64 / denom)).collect();
        coverage.sort_unstable_by_key(|c| c.0);
        let mean_coverage =
            if coverage.is_empty() { 0.0 } else { coverage.iter().map(|c| c.1).sum::<f64>() / coverage.len() as f64 };
        DisseminationReport {
            n: self.n,
            messages: self.tallies.len() as u64,
            delivered: self.delivered,
            duplicates: self.duplicates,
            coverage,
            mean_coverage,
            hop_histogram: self.hop_histogram,
            control_messages: 0,
        }
    }
}

/// Dissemination metrics of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct DisseminationReport {
    pub n: usize,
    pub messages: u64,
    /// R lines.
    pub delivered: u64,
    /// D lines.
    pub duplicates: u64,
    /// Distinct receivers over `n - 1`, per message.
    pub coverage: Vec<(MsgId, f64)>,
    pub mean_coverage: f64,
    /// `hop_histogram[h]`: receptions after `h` hops.
    pub hop_histogram: Vec<u64>,
    /// Stimuli, taken from the engine stats; traces carry none.
    pub control_messages: u64,
}

impl DisseminationReport {
    pub fn from_events<'a, I>(events: I, n: usize) -> Result<Self, ReportError>
    where
        I: IntoIterator<Item = &'a TraceEvent>,
    {
        let mut a = DisseminationAnalyzer::new(n);
        for e in events {
            a.feed(e)?;
        }
        Ok(a.finish())
    }

    pub fn with_control(mut self, stats: &EngineStats) -> Self {
        self.control_messages = stats.control_messages;
        self
    }

    pub fn data_receptions(&self) -> u64 {
        self.delivered + self.duplicates
    }

    pub fn mean_hops(&self) -> f64 {
        let total: u64 = self.hop_histogram.iter().sum();
        if total == 0 {
            return 0.0;
        }
        self.hop_histogram.iter().enumerate().map(|(h, &c)| h as u64 * c).sum::<u64>() as f64 / total as f64
    }

    pub fn summary_pairs(&self) -> Vec<(&'static str, String)> {
        alloc::vec![
            ("n", self.n.to_string()),
            ("messages", self.messages.to_string()),
            ("delivered", self.delivered.to_string()),
            ("duplicates", self.duplicates.to_string()),
            ("mean_coverage", format!("{:.6}", self.mean_coverage)),
            ("mean_hops", format!("{:.6}", self.mean_hops())),
            ("control_messages", self.control_messages.to_string()),
        ]
    }

    pub fn hop_histogram_csv(&self) -> String {
        let mut out = String::from("hops,receptions\n");
        for (h, c) in self.hop_histogram.iter().enumerate() {
            let _ = writeln!(out, "{h},{c}");
        }
        out
    }

    pub fn coverage_csv(&self) -> String {
        let mut out = String::from("origin,seq,coverage\n");
        for (m, c) in &self.coverage {
            let _ = writeln!(out, "{},{},{c:.6}", m.origin, m.seq);
        }
        out
    }
}

/// Unweighted means over the graphs of a corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusSummary {
    pub graphs: usize,
    pub total_delivered: u64,
    pub mean_delivered: f64,
    pub mean_coverage: f64,
    pub mean_duplicates: f64,
}

pub fn corpus_summary(reports: &[DisseminationReport]) -> CorpusSummary {
    let k = reports.len().max(1) as f64;
    CorpusSummary {
        graphs: reports.len(),
        total_delivered: reports.iter().map(|r| r.delivered).sum(),
        mean_delivered: reports.iter().map(|r| r.delivered as f64).sum::<f64>() / k,
        mean_coverage: reports.iter().map(|r| r.mean_coverage).sum::<f64>() / k,
        mean_duplicates: reports.iter().map(|r| r.duplicates as f64).sum::<f64>() / k,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedupRow {
    pub label: String,
    pub lp: usize,
    pub gaia: bool,
    pub wct_seconds: f64,
    pub speedup: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedupReport {
    pub baseline_wct: f64,
    pub rows: Vec<SpeedupRow>,
}

/// Speedup of every run against the single sequential run (one LP,
/// clustering off) in the list.
pub fn speedup_report(runs: &[(String, EngineStats)]) -> Result<SpeedupReport, ReportError> {
    let sequential: Vec<&(String, EngineStats)> = runs.iter().filter(|(_, s)| s.lp_count == 1 && !s.gaia).collect();
    let baseline = match sequential.as_slice() {
        [one] => one.1.wct_seconds,
        [] => return Err(ReportError::Input("no sequential baseline (lp=1, gaia=off) among the runs".into())),
        _ => return Err(ReportError::Input("more than one sequential baseline (lp=1, gaia=off)".into())),
    };
    let rows = runs
        .iter()
        .map(|(label, s)| SpeedupRow {
            label: label.clone(),
            lp: s.lp_count,
            gaia: s.gaia,
            wct_seconds: s.wct_seconds,
            speedup: if s.wct_seconds > 0.0 { baseline / s.wct_seconds } else { f64::INFINITY },
        })
        .collect();
    Ok(SpeedupReport { baseline_wct: baseline, rows })
}

impl SpeedupReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("label,lp,gaia,wct_seconds,speedup\n");
        for r in &self.rows {
            let gaia = if r.gaia { "on" } else { "off" };
            let _ = writeln!(out, "{},{},{gaia},{:.6},{:.6}", r.label, r.lp, r.wct_seconds, r.speedup);
        }
        out
    }
}
