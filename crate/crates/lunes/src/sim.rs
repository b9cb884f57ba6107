//! Running a scenario over a corpus and writing traces and statistics.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use lunes_core::config::ScenarioConfig;
use lunes_core::engine::{run, EngineStats, Sequential};
use lunes_core::graph::{Corpus, Graph};
use lunes_core::kv::write_kv;
use lunes_core::protocols::Gossip;
use lunes_core::trace::TraceSink;

use crate::error::{CliError, Result};
use crate::exec::Threaded;
use crate::trace_io::{create_trace, format_version_pair, ProtocolDigest, HEADER_KEYS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecutorKind {
    /// One worker thread per LP.
    #[default]
    Threads,
    /// All LPs on the calling thread.
    Sequential,
}

impl FromStr for ExecutorKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threads" => Ok(ExecutorKind::Threads),
            "sequential" => Ok(ExecutorKind::Sequential),
            other => Err(CliError::usage(format!("unknown executor `{other}` (expected threads or sequential)"))),
        }
    }
}

/// Runs one graph, feeding `sink`. WCT covers the engine run only.
pub fn run_graph<T: TraceSink + ?Sized>(
    cfg: &ScenarioConfig,
    graph: &Graph,
    executor: ExecutorKind,
    sink: &mut T,
) -> Result<(EngineStats, u32)> {
    let params = cfg.gossip_for(graph)?;
    let ttl = params.ttl;
    let protocol = Gossip::new(params)?;
    let start = Instant::now();
    let outcome = match executor {
        ExecutorKind::Threads => run(&cfg.engine, graph, &protocol, &Threaded, sink)?,
        ExecutorKind::Sequential => run(&cfg.engine, graph, &protocol, &Sequential, sink)?,
    };
    let mut stats = outcome.stats;
    stats.wct_seconds = start.elapsed().as_secs_f64();
    Ok((stats, ttl))
}

/// Header of the trace of corpus member `index`: the fixed keys, then the
/// rest of the effective configuration.
pub fn trace_header(cfg: &ScenarioConfig, graph: &Graph, ttl: u32, index: usize) -> Vec<(String, String)> {
    let mut pairs: Vec<(String, String)> = cfg.to_pairs().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let mut set = |k: &str, v: String| match pairs.iter_mut().find(|(key, _)| key == k) {
        Some(p) => p.1 = v,
        None => pairs.push((k.to_string(), v)),
    };
    set("ttl", ttl.to_string());
    set("n", graph.node_count().to_string());
    set("e", graph.edge_count().to_string());
    set("graph", index.to_string());
    let mut header = vec![format_version_pair()];
    for key in HEADER_KEYS {
        if let Some(pos) = pairs.iter().position(|(k, _)| k == key) {
            header.push(pairs.remove(pos));
        }
    }
    header.extend(pairs);
    header
}

#[derive(Clone, Debug)]
pub struct GraphRun {
    pub index: usize,
    pub ttl: u32,
    pub stats: EngineStats,
    /// Digest of the G/R/D lines.
    pub digest: [u8; 32],
    pub trace: Option<PathBuf>,
}

pub fn stem(index: usize) -> String {
    format!("graph_{index:03}")
}

/// Simulates every corpus member in order. With `out`, writes
/// `graph_NNN.trace`, `.stats` and `.series.csv` per member.
pub fn simulate_corpus(
    cfg: &ScenarioConfig,
    corpus: &Corpus,
    out: Option<&Path>,
    executor: ExecutorKind,
) -> Result<Vec<GraphRun>> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let mut runs = Vec::with_capacity(corpus.graphs.len());
    for (index, graph) in corpus.graphs.iter().enumerate() {
        let mut digest = ProtocolDigest::new();
        let (stats, ttl, trace) = match out {
            None => {
                let (stats, ttl) = run_graph(cfg, graph, executor, &mut digest)?;
                (stats, ttl, None)
            }
            Some(dir) => {
                let ttl = cfg.ttl.resolve(graph)?;
                let path = dir.join(format!("{}.trace", stem(index)));
                let mut writer = create_trace(&path, &trace_header(cfg, graph, ttl, index))?;
                let (stats, _) = run_graph(cfg, graph, executor, &mut (&mut writer, &mut digest))?;
                writer.finish().map_err(CliError::io(&path))?;
                write_stats(dir, &stem(index), &stats, &[("ttl", ttl.to_string())])?;
                (stats, ttl, Some(path))
            }
        };
        runs.push(GraphRun { index, ttl, stats, digest: digest.finish(), trace });
    }
    Ok(runs)
}

/// Writes `<stem>.stats` (summary) and `<stem>.series.csv`.
pub fn write_stats(dir: &Path, stem: &str, stats: &EngineStats, extra: &[(&str, String)]) -> Result<()> {
    let mut pairs = stats.summary_pairs(stem);
    pairs.extend(extra.iter().cloned());
    let path = dir.join(format!("{stem}.stats"));
    fs::write(&path, write_kv(pairs)).map_err(CliError::io(&path))?;
    let path = dir.join(format!("{stem}.series.csv"));
    fs::write(&path, stats.series_csv()).map_err(CliError::io(&path))
}
