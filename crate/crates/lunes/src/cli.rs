//! The `lunes` command line: `gen`, `sim`, `analyze` and `bench`.
//!
//! Every flag has a configuration-file key of the same name (dashes become
//! underscores) and an environment override `LUNES_<KEY>`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lunes_core::config::ScenarioConfig;
use lunes_core::graph::{Corpus, CorpusModel};

use crate::analyze::{analyze_trace, render, require_clean, speedup_from_files, ReportKind};
use crate::bench::{bench_corpus, TABLE1};
use crate::corpus_io::{import_corpus, model_from_flags, read_corpus, write_corpus};
use crate::error::{CliError, Result};
use crate::settings::Settings;
use crate::sim::{simulate_corpus, stem, ExecutorKind};
use crate::trace_io::hex;

#[derive(Debug, Parser)]
#[command(name = "lunes", version, about = "Gossip dissemination on partitioned time-stepped simulations")]
pub struct Cli {
    /// Configuration file of `key=value` lines (also LUNES_CONFIG).
    #[arg(long, global = true, env = "LUNES_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate or import a corpus of graphs.
    Gen(GenArgs),
    /// Run a protocol over every graph of a corpus.
    Sim(SimArgs),
    /// Summarize traces or compare stats files.
    Analyze(AnalyzeArgs),
    /// Run one scenario under the five reference configurations.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// er, ba or dot (import the --input files).
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub nodes: Option<String>,
    #[arg(long)]
    pub edges: Option<String>,
    /// Seed clique size for ba.
    #[arg(long)]
    pub m0: Option<String>,
    /// Edges per new node for ba.
    #[arg(long)]
    pub m_attach: Option<String>,
    #[arg(long)]
    pub count: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub label: Option<String>,
    /// Dot files to import (model dot).
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub input: Vec<String>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ScenarioArgs {
    /// Corpus directory.
    #[arg(long)]
    pub corpus: Option<String>,
    #[arg(long)]
    pub scenario: Option<String>,
    /// broadcast, fixed or adaptive.
    #[arg(long)]
    pub protocol: Option<String>,
    /// Baseline forwarding probability.
    #[arg(long)]
    pub prob: Option<String>,
    /// Generation probability per node and timestep.
    #[arg(long)]
    pub gen_prob: Option<String>,
    /// Hop budget, or `auto` for ceil(ln n / ln(e/n)).
    #[arg(long)]
    pub ttl: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub stim_prob: Option<String>,
    #[arg(long)]
    pub stim_duration: Option<String>,
    #[arg(long)]
    pub recv_window: Option<String>,
    /// on: every (origin, neighbor) pair starts boosted for stim_duration.
    #[arg(long)]
    pub preboost: Option<String>,
    #[arg(long)]
    pub steps: Option<String>,
    /// Number of logical processes.
    #[arg(long)]
    pub lp: Option<String>,
    /// Clustering migrations: on or off.
    #[arg(long)]
    pub gaia: Option<String>,
    /// Load slack of the population cap.
    #[arg(long)]
    pub delta: Option<String>,
    /// Audit window in timesteps.
    #[arg(long)]
    pub window: Option<String>,
    /// Migration attraction threshold.
    #[arg(long)]
    pub theta: Option<String>,
    /// Migration period in timesteps.
    #[arg(long)]
    pub k_mig: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// 2 adds S lines to traces.
    #[arg(long)]
    pub verbosity: Option<String>,
    /// threads or sequential.
    #[arg(long)]
    pub executor: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub trace: Vec<String>,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub stats: Vec<String>,
    /// coverage, messages, delay or speedup.
    #[arg(long)]
    pub report: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// `table1` runs the four reference (n, e) scenarios on generated corpora.
    #[arg(long)]
    pub scenarios: Option<String>,
    /// Graphs per generated corpus.
    #[arg(long)]
    pub count: Option<String>,
}

const GEN_KEYS: &[&str] = &["model", "nodes", "edges", "m0", "m_attach", "count", "seed", "label", "input", "out"];
const SIM_EXTRA: &[&str] = &["executor", "out"];
const ANALYZE_KEYS: &[&str] = &["trace", "stats", "report"];
const BENCH_EXTRA: &[&str] = &["scenarios", "count"];

fn push(pairs: &mut Vec<(&'static str, String)>, key: &'static str, value: &Option<String>) {
    if let Some(v) = value {
        pairs.push((key, v.clone()));
    }
}

fn push_list(pairs: &mut Vec<(&'static str, String)>, key: &'static str, values: &[String]) {
    if !values.is_empty() {
        pairs.push((key, values.join(",")));
    }
}

impl ScenarioArgs {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut p = Vec::new();
        push(&mut p, "corpus", &self.corpus);
        push(&mut p, "scenario", &self.scenario);
        push(&mut p, "protocol", &self.protocol);
        push(&mut p, "prob", &self.prob);
        push(&mut p, "gen_prob", &self.gen_prob);
        push(&mut p, "ttl", &self.ttl);
        push(&mut p, "alpha", &self.alpha);
        push(&mut p, "stim_prob", &self.stim_prob);
        push(&mut p, "stim_duration", &self.stim_duration);
        push(&mut p, "recv_window", &self.recv_window);
        push(&mut p, "preboost", &self.preboost);
        push(&mut p, "steps", &self.steps);
        push(&mut p, "lp", &self.lp);
        push(&mut p, "gaia", &self.gaia);
        push(&mut p, "delta", &self.delta);
        push(&mut p, "window", &self.window);
        push(&mut p, "theta", &self.theta);
        push(&mut p, "k_mig", &self.k_mig);
        push(&mut p, "seed", &self.seed);
        push(&mut p, "verbosity", &self.verbosity);
        push(&mut p, "executor", &self.executor);
        push(&mut p, "out", &self.out);
        p
    }
}

fn keys(extra: &[&'static str]) -> Vec<&'static str> {
    ScenarioConfig::KEYS.iter().chain(extra).copied().collect()
}

fn scenario_config(settings: &Settings) -> Result<ScenarioConfig> {
    Ok(ScenarioConfig::from_pairs(settings.subset(ScenarioConfig::KEYS))?)
}

fn executor(settings: &Settings) -> Result<ExecutorKind> {
    Ok(settings.parse("executor")?.unwrap_or_default())
}

/// Directory name used as default label and output name.
fn base_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "corpus".into())
}

/// Parses the arguments and runs the command, writing reports to `out`.
pub fn execute(cli: Cli, out: &mut dyn std::io::Write) -> Result<()> {
    let config = cli.config.as_deref();
    let mut say = |line: String| {
        let _ = writeln!(out, "{line}");
    };
    match cli.command {
        Command::Gen(a) => {
            let mut p = Vec::new();
            push(&mut p, "model", &a.model);
            push(&mut p, "nodes", &a.nodes);
            push(&mut p, "edges", &a.edges);
            push(&mut p, "m0", &a.m0);
            push(&mut p, "m_attach", &a.m_attach);
            push(&mut p, "count", &a.count);
            push(&mut p, "seed", &a.seed);
            push(&mut p, "label", &a.label);
            push_list(&mut p, "input", &a.input);
            push(&mut p, "out", &a.out);
            let s = Settings::load(GEN_KEYS, config, &p)?;
            let dir = PathBuf::from(s.require("out")?);
            let label = s.get("label").map(String::from).unwrap_or_else(|| base_name(&dir));
            let corpus = match s.require("model")? {
                "dot" => {
                    let files = s.list("input");
                    if files.is_empty() {
                        return Err(CliError::usage("model dot needs --input files"));
                    }
                    import_corpus(&label, &files)?
                }
                model => {
                    let m = model_from_flags(
                        model,
                        s.parse("nodes")?,
                        s.parse("edges")?,
                        s.parse("m0")?,
                        s.parse("m_attach")?,
                    )?;
                    Corpus::generate(&label, m, s.parse("count")?.unwrap_or(10), s.parse("seed")?.unwrap_or(0))?
                }
            };
            write_corpus(&dir, &corpus)?;
            say(format!(
                "wrote {} graphs ({} nodes, {} edges) to {}",
                corpus.graphs.len(),
                corpus.model.node_count(),
                corpus.model.edge_count(),
                dir.display()
            ));
        }
        Command::Sim(a) => {
            let s = Settings::load(&keys(SIM_EXTRA), config, &a.scenario.pairs())?;
            let mut cfg = scenario_config(&s)?;
            let corpus_dir = PathBuf::from(s.require("corpus")?);
            let corpus = read_corpus(&corpus_dir)?;
            if cfg.scenario.is_empty() {
                cfg.scenario = corpus.label.clone();
            }
            let out_dir =
                s.get("out").map(PathBuf::from).unwrap_or_else(|| Path::new("runs").join(base_name(&corpus_dir)));
            let runs = simulate_corpus(&cfg, &corpus, Some(&out_dir), executor(&s)?)?;
            for r in &runs {
                say(format!(
                    "{} ttl={} messages={} inter_lp_ratio={:.4} migrations={} wct_seconds={:.3} digest={}",
                    stem(r.index),
                    r.ttl,
                    r.stats.total_messages,
                    r.stats.inter_lp_ratio(),
                    r.stats.migrations,
                    r.stats.wct_seconds,
                    &hex(&r.digest)[..16]
                ));
            }
        }
        Command::Analyze(a) => {
            let mut p = Vec::new();
            push_list(&mut p, "trace", &a.trace);
            push_list(&mut p, "stats", &a.stats);
            push(&mut p, "report", &a.report);
            let s = Settings::load(ANALYZE_KEYS, config, &p)?;
            let kind: ReportKind = s.parse("report")?.unwrap_or(ReportKind::Messages);
            if kind == ReportKind::Speedup {
                let files: Vec<PathBuf> = s.list("stats").into_iter().map(PathBuf::from).collect();
                if files.is_empty() {
                    return Err(CliError::usage("speedup report needs --stats files"));
                }
                say(speedup_from_files(&files)?.csv().trim_end().to_string());
                return Ok(());
            }
            let traces = s.list("trace");
            if traces.is_empty() {
                return Err(CliError::usage("report needs --trace files"));
            }
            let analyses = traces.iter().map(|t| analyze_trace(Path::new(t))).collect::<Result<Vec<_>>>()?;
            require_clean(&analyses)?;
            say(render(kind, &analyses).trim_end().to_string());
        }
        Command::Bench(a) => {
            let mut p = a.scenario.pairs();
            push(&mut p, "scenarios", &a.scenarios);
            push(&mut p, "count", &a.count);
            let s = Settings::load(&keys(&[SIM_EXTRA, BENCH_EXTRA].concat()), config, &p)?;
            let cfg = scenario_config(&s)?;
            let exec = executor(&s)?;
            let out_dir = PathBuf::from(s.get("out").unwrap_or("bench"));
            let mut jobs: Vec<(String, ScenarioConfig, Corpus)> = Vec::new();
            match s.get("scenarios") {
                Some("table1") => {
                    let count = s.parse("count")?.unwrap_or(10);
                    for (label, n, m) in TABLE1 {
                        let corpus = Corpus::generate(label, CorpusModel::ErdosRenyi { n, m }, count, cfg.engine.seed)?;
                        jobs.push((
                            label.to_string(),
                            ScenarioConfig { scenario: label.into(), ..cfg.clone() },
                            corpus,
                        ));
                    }
                }
                Some(other) => {
                    return Err(CliError::usage(format!("unknown scenario set `{other}` (expected table1)")))
                }
                None => {
                    let dir = PathBuf::from(s.require("corpus")?);
                    let corpus = read_corpus(&dir)?;
                    let mut c = cfg.clone();
                    if c.scenario.is_empty() {
                        c.scenario = corpus.label.clone();
                    }
                    jobs.push((base_name(&dir), c, corpus));
                }
            }
            let single = jobs.len() == 1;
            for (label, c, corpus) in jobs {
                let dir = if single { out_dir.clone() } else { out_dir.join(&label) };
                let outcome = bench_corpus(&c, &corpus, Some(&dir), exec)?;
                say(format!("# scenario={label} equivalence=ok graphs={}", corpus.graphs.len()));
                say(outcome.speedup.csv().trim_end().to_string());
            }
        }
    }
    Ok(())
}
