use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;
use core::ops::Range;

use crate::kv::{parse_kv, KvError};

/// Traffic of one timestep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepSample {
    pub total: u64,
    pub inter: u64,
}

impl StepSample {
    pub fn ratio(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.inter as f64 / self.total as f64
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EngineStats {
    pub lp_count: usize,
    pub gaia: bool,
    pub total_messages: u64,
    pub intra_lp_messages: u64,
    pub inter_lp_messages: u64,
    /// Stimuli and other non-data messages, included in the totals above.
    pub control_messages: u64,
    pub migrations: u64,
    /// Bytes of entity state moved between LPs.
    pub migration_cost_units: u64,
    pub wct_seconds: f64,
    pub samples: Vec<StepSample>,
    /// LP populations after each timestep's migration barrier.
    pub populations: Vec<Vec<usize>>,
}

impl EngineStats {
    pub fn inter_lp_ratio(&self) -> f64 {
        StepSample { total: self.total_messages, inter: self.inter_lp_messages }.ratio()
    }

    /// Pooled inter-LP ratio over a range of timesteps.
    pub fn span_ratio(&self, steps: Range<usize>) -> f64 {
        let end = steps.end.min(self.samples.len());
        let start = steps.start.min(end);
        let pooled = self.samples[start..end].iter().fold(StepSample::default(), |acc, s| StepSample {
            total: acc.total + s.total,
            inter: acc.inter + s.inter,
        });
        pooled.ratio()
    }

    /// Pooled inter-LP ratio over quartile `q` (0..4) of the run.
    pub fn quartile_ratio(&self, q: usize) -> f64 {
        let s = self.samples.len();
        self.span_ratio(q * s / 4..(q + 1) * s / 4)
    }

    pub fn summary_pairs(&self, label: &str) -> Vec<(&'static str, String)> {
        alloc::vec![
            ("label", label.to_string()),
            ("lp", self.lp_count.to_string()),
            ("gaia", if self.gaia { "on" } else { "off" }.to_string()),
            ("steps", self.samples.len().to_string()),
            ("total_messages", self.total_messages.to_string()),
            ("intra_lp_messages", self.intra_lp_messages.to_string()),
            ("inter_lp_messages", self.inter_lp_messages.to_string()),
            ("control_messages", self.control_messages.to_string()),
            ("inter_lp_ratio", format!("{:.6}", self.inter_lp_ratio())),
            ("migrations", self.migrations.to_string()),
            ("migration_cost_units", self.migration_cost_units.to_string()),
            ("wct_seconds", format!("{:.6}", self.wct_seconds)),
        ]
    }

    /// `t,inter_lp_ratio,lp0,lp1,...` one row per timestep.
    pub fn series_csv(&self) -> String {
        let mut out = String::from("t,inter_lp_ratio");
        for l in 0..self.lp_count {
            let _ = write!(out, ",lp{l}");
        }
        out.push('\n');
        for (t, s) in self.samples.iter().enumerate() {
            let _ = write!(out, "{t},{:.6}", s.ratio());
            if let Some(pops) = self.populations.get(t) {
                for p in pops {
                    let _ = write!(out, ",{p}");
                }
            }
            out.push('\n');
        }
        out
    }

    /// Reads a summary written from [`EngineStats::summary_pairs`]. The
    /// per-step series is not part of the summary and stays empty.
    pub fn parse_summary(text: &str) -> Result<(String, Self), KvError> {
        let pairs = parse_kv(text)?;
        let map: BTreeMap<&str, &str> = pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        fn field<T: core::str::FromStr>(map: &BTreeMap<&str, &str>, key: &str) -> Result<T, KvError> {
            let raw = map.get(key).ok_or_else(|| KvError { line: 0, message: format!("missing `{key}`") })?;
            raw.parse().map_err(|_| KvError { line: 0, message: format!("invalid `{key}` value `{raw}`") })
        }
        let gaia = match map.get("gaia").copied() {
            Some("on") => true,
            Some("off") => false,
            other => return Err(KvError { line: 0, message: format!("invalid `gaia` value {other:?}") }),
        };
        let stats = EngineStats {
            lp_count: field(&map, "lp")?,
            gaia,
            total_messages: field(&map, "total_messages")?,
            intra_lp_messages: field(&map, "intra_lp_messages")?,
            inter_lp_messages: field(&map, "inter_lp_messages")?,
            control_messages: field(&map, "control_messages")?,
            migrations: field(&map, "migrations")?,
            migration_cost_units: field(&map, "migration_cost_units")?,
            wct_seconds: field(&map, "wct_seconds")?,
            samples: Vec::new(),
            populations: Vec::new(),
        };
        Ok((map.get("label").unwrap_or(&"").to_string(), stats))
    }
}
