//! Speedup benchmark over the five reference configurations.

use std::fs;
use std::path::Path;

use lunes_core::config::ScenarioConfig;
use lunes_core::engine::{EngineStats, StepSample};
use lunes_core::graph::Corpus;
use lunes_core::trace::{speedup_report, SpeedupReport};

use crate::error::{CliError, Result};
use crate::sim::{simulate_corpus, write_stats, ExecutorKind};
use crate::trace_io::hex;

/// `(lp, gaia)` pairs, sequential baseline first.
pub const CONFIGURATIONS: [(usize, bool); 5] = [(1, false), (2, false), (4, false), (2, true), (4, true)];

/// `(label, n, e)` of the four reference scenarios.
pub const TABLE1: [(&str, usize, usize); 4] = [("s1", 200, 400), ("s2", 300, 600), ("s3", 400, 800), ("s4", 500, 1000)];

pub fn config_label(lp: usize, gaia: bool) -> String {
    format!("lp{lp}_gaia_{}", if gaia { "on" } else { "off" })
}

/// Adds `b` into `a`: counters and WCT are summed, samples element-wise.
pub fn accumulate(a: &mut EngineStats, b: &EngineStats) {
    a.lp_count = b.lp_count;
    a.gaia = b.gaia;
    a.total_messages += b.total_messages;
    a.intra_lp_messages += b.intra_lp_messages;
    a.inter_lp_messages += b.inter_lp_messages;
    a.control_messages += b.control_messages;
    a.migrations += b.migrations;
    a.migration_cost_units += b.migration_cost_units;
    a.wct_seconds += b.wct_seconds;
    if a.samples.len() < b.samples.len() {
        a.samples.resize(b.samples.len(), StepSample::default());
    }
    for (x, y) in a.samples.iter_mut().zip(&b.samples) {
        x.total += y.total;
        x.inter += y.inter;
    }
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    /// Corpus-wide stats per configuration, labelled by [`config_label`].
    pub runs: Vec<(String, EngineStats)>,
    pub speedup: SpeedupReport,
}

/// Runs the corpus under every configuration, one after the other, and fails
/// if any member's protocol-level trace differs from the sequential run.
pub fn bench_corpus(
    cfg: &ScenarioConfig,
    corpus: &Corpus,
    out: Option<&Path>,
    executor: ExecutorKind,
) -> Result<BenchOutcome> {
    let mut baseline: Option<Vec<[u8; 32]>> = None;
    let mut runs = Vec::new();
    for (lp, gaia) in CONFIGURATIONS {
        let mut c = cfg.clone();
        c.engine.lp_count = lp;
        c.engine.gaia = gaia;
        let label = config_label(lp, gaia);
        let graph_runs = simulate_corpus(&c, corpus, None, executor)?;
        let digests: Vec<[u8; 32]> = graph_runs.iter().map(|r| r.digest).collect();
        match &baseline {
            None => baseline = Some(digests),
            Some(base) => {
                if let Some(k) = (0..base.len()).find(|&k| base[k] != digests[k]) {
                    return Err(CliError::Invariant(format!(
                        "{label}: protocol trace of graph {k} differs from the sequential run ({} vs {})",
                        hex(&digests[k]),
                        hex(&base[k])
                    )));
                }
            }
        }
        let mut total = EngineStats::default();
        graph_runs.iter().for_each(|r| accumulate(&mut total, &r.stats));
        runs.push((label, total));
    }
    let speedup = speedup_report(&runs)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        for (label, stats) in &runs {
            write_stats(dir, label, stats, &[("graphs", corpus.graphs.len().to_string())])?;
        }
        let path = dir.join("speedup.csv");
        fs::write(&path, speedup.csv()).map_err(CliError::io(&path))?;
    }
    Ok(BenchOutcome { runs, speedup })
}
