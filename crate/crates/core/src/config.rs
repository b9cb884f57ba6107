//! Flat `key=value` scenario configuration.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use crate::engine::{EngineError, EngineParams};
use crate::graph::{ttl_auto, Graph};
use crate::protocols::{GossipParams, ProtocolKind};

/// Hop budget: a fixed value or `ceil(ln n / ln(e/n))` per graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TtlSpec {
    Fixed(u32),
    Auto,
}

impl TtlSpec {
    pub fn resolve(&self, graph: &Graph) -> Result<u32, EngineError> {
        match *self {
            TtlSpec::Fixed(t) => Ok(t),
            TtlSpec::Auto => ttl_auto(graph).map_err(|e| EngineError::Config(format!("ttl auto: {e}"))),
        }
    }
}

impl FromStr for TtlSpec {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(TtlSpec::Auto);
        }
        parse_num(s, "ttl").map(TtlSpec::Fixed)
    }
}

/// Everything needed to run one protocol over one corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub corpus: Option<String>,
    pub scenario: String,
    pub protocol: GossipParams,
    pub ttl: TtlSpec,
    pub engine: EngineParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            scenario: String::new(),
            protocol: GossipParams::default(),
            ttl: TtlSpec::Auto,
            engine: EngineParams::default(),
        }
    }
}

fn parse_num<T: FromStr>(value: &str, key: &str) -> Result<T, EngineError> {
    value.trim().parse().map_err(|_| EngineError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_switch(value: &str, key: &str) -> Result<bool, EngineError> {
    match value.trim() {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        _ => Err(EngineError::Config(format!("invalid value `{value}` for `{key}` (expected on or off)"))),
    }
}

fn switch(b: bool) -> String {
    if b { "on" } else { "off" }.to_string()
}

impl ScenarioConfig {
    /// Keys accepted by [`ScenarioConfig::set`].
    pub const KEYS: &'static [&'static str] = &[
        "corpus",
        "scenario",
        "protocol",
        "prob",
        "gen_prob",
        "ttl",
        "alpha",
        "stim_prob",
        "stim_duration",
        "recv_window",
        "preboost",
        "steps",
        "lp",
        "gaia",
        "delta",
        "window",
        "theta",
        "k_mig",
        "seed",
        "verbosity",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), EngineError> {
        let p = &mut self.protocol;
        let e = &mut self.engine;
        match key {
            "corpus" => self.corpus = Some(value.to_string()),
            "scenario" => self.scenario = value.to_string(),
            "protocol" => p.kind = value.trim().parse()?,
            "prob" => p.prob = parse_num(value, key)?,
            "gen_prob" => p.gen_prob = parse_num(value, key)?,
            "ttl" => self.ttl = value.trim().parse()?,
            "alpha" => p.alpha = parse_num(value, key)?,
            "stim_prob" => p.stim_prob = parse_num(value, key)?,
            "stim_duration" => p.stim_duration = parse_num(value, key)?,
            "recv_window" => p.recv_window = parse_num(value, key)?,
            "preboost" => p.preboost = parse_switch(value, key)?,
            "steps" => e.steps = parse_num(value, key)?,
            "lp" => e.lp_count = parse_num(value, key)?,
            "gaia" => e.gaia = parse_switch(value, key)?,
            "delta" => e.delta = parse_num(value, key)?,
            "window" => e.window = parse_num(value, key)?,
            "theta" => e.theta = parse_num(value, key)?,
            "k_mig" => e.k_mig = parse_num(value, key)?,
            "seed" => e.seed = parse_num(value, key)?,
            "verbosity" => e.verbosity = parse_num(value, key)?,
            other => return Err(EngineError::Config(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies pairs in order; later pairs win.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self, EngineError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut cfg = Self::default();
        for (k, v) in pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        self.engine.validate()?;
        self.protocol.validate()
    }

    /// Protocol parameters with the hop budget resolved for `graph`.
    pub fn gossip_for(&self, graph: &Graph) -> Result<GossipParams, EngineError> {
        Ok(GossipParams { ttl: self.ttl.resolve(graph)?, ..self.protocol.clone() })
    }

    /// Effective configuration as `key=value` pairs, in [`Self::KEYS`] order.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let p = &self.protocol;
        let e = &self.engine;
        let ttl = match self.ttl {
            TtlSpec::Auto => "auto".to_string(),
            TtlSpec::Fixed(t) => t.to_string(),
        };
        let mut out = Vec::new();
        if let Some(c) = &self.corpus {
            out.push(("corpus", c.clone()));
        }
        out.extend([
            ("scenario", self.scenario.clone()),
            ("protocol", p.kind.name().to_string()),
            ("prob", p.prob.to_string()),
            ("gen_prob", p.gen_prob.to_string()),
            ("ttl", ttl),
            ("alpha", p.alpha.to_string()),
            ("stim_prob", p.stim_prob.to_string()),
            ("stim_duration", p.stim_duration.to_string()),
            ("recv_window", p.recv_window.to_string()),
            ("preboost", switch(p.preboost)),
            ("steps", e.steps.to_string()),
            ("lp", e.lp_count.to_string()),
            ("gaia", switch(e.gaia)),
            ("delta", e.delta.to_string()),
            ("window", e.window.to_string()),
            ("theta", e.theta.to_string()),
            ("k_mig", e.k_mig.to_string()),
            ("seed", e.seed.to_string()),
            ("verbosity", e.verbosity.to_string()),
        ]);
        out
    }
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Broadcast, ProtocolKind::Fixed, ProtocolKind::Adaptive];
}
