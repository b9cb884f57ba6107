use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{gen_barabasi_albert, gen_erdos_renyi, Graph, GraphError, ImportedGraph};
use crate::kv::{parse_kv, write_kv};
use crate::rng::derive_seed;

pub const CORPUS_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusModel {
    ErdosRenyi {
        n: usize,
        m: usize,
    },
    BarabasiAlbert {
        n: usize,
        m0: usize,
        m_attach: usize,
    },
    /// Topologies imported from external dot files.
    Imported {
        n: usize,
        m: usize,
    },
}

impl CorpusModel {
    pub fn name(&self) -> &'static str {
        match self {
            CorpusModel::ErdosRenyi { .. } => "er",
            CorpusModel::BarabasiAlbert { .. } => "ba",
            CorpusModel::Imported { .. } => "dot",
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            CorpusModel::ErdosRenyi { n, .. }
            | CorpusModel::BarabasiAlbert { n, .. }
            | CorpusModel::Imported { n, .. } => n,
        }
    }

    pub fn edge_count(&self) -> usize {
        match *self {
            CorpusModel::ErdosRenyi { m, .. } | CorpusModel::Imported { m, .. } => m,
            CorpusModel::BarabasiAlbert { n, m0, m_attach } => {
                m0 * (m0.saturating_sub(1)) / 2 + m_attach * n.saturating_sub(m0)
            }
        }
    }

    fn generate(&self, seed: u64) -> Result<Graph, GraphError> {
        match *self {
            CorpusModel::ErdosRenyi { n, m } => gen_erdos_renyi(n, m, seed),
            CorpusModel::BarabasiAlbert { n, m0, m_attach } => gen_barabasi_albert(n, m0, m_attach, seed),
            CorpusModel::Imported { .. } => Err(GraphError::Parameter("imported corpora cannot be regenerated".into())),
        }
    }
}

/// An ordered set of graphs with common `(n, e)` used as one testbed.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub label: String,
    pub model: CorpusModel,
    pub master_seed: u64,
    pub graphs: Vec<Graph>,
    /// Original node ids of imported graphs whose ids were renumbered.
    pub mappings: BTreeMap<usize, Vec<u64>>,
}

impl Corpus {
    /// Seed of member `k`.
    pub fn graph_seed(master_seed: u64, k: usize) -> u64 {
        derive_seed(master_seed, k as u64)
    }

    pub fn file_name(k: usize) -> String {
        format!("graph_{k:03}.dot")
    }

    pub fn generate(label: &str, model: CorpusModel, count: usize, master_seed: u64) -> Result<Self, GraphError> {
        if count == 0 {
            return Err(GraphError::Parameter("corpus count must be at least 1".into()));
        }
        let graphs =
            (0..count).map(|k| model.generate(Self::graph_seed(master_seed, k))).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { label: label.to_string(), model, master_seed, graphs, mappings: BTreeMap::new() })
    }

    /// Corpus of externally produced topologies. All members must share n and e.
    pub fn from_imported(label: &str, imported: Vec<ImportedGraph>) -> Result<Self, GraphError> {
        let first = imported.first().ok_or_else(|| GraphError::Parameter("corpus count must be at least 1".into()))?;
        let (n, m) = (first.graph.node_count(), first.graph.edge_count());
        let mut graphs = Vec::with_capacity(imported.len());
        let mut mappings = BTreeMap::new();
        for (k, g) in imported.into_iter().enumerate() {
            if g.graph.node_count() != n || g.graph.edge_count() != m {
                return Err(GraphError::Parameter(format!(
                    "graph {k} has {} nodes / {} edges, corpus requires {n} / {m}",
                    g.graph.node_count(),
                    g.graph.edge_count()
                )));
            }
            if !g.is_identity() {
                mappings.insert(k, g.labels);
            }
            graphs.push(g.graph);
        }
        Ok(Self { label: label.to_string(), model: CorpusModel::Imported { n, m }, master_seed: 0, graphs, mappings })
    }

    pub fn manifest(&self) -> String {
        let mut pairs: Vec<(&str, String)> = Vec::new();
        pairs.push(("format_version", CORPUS_FORMAT_VERSION.to_string()));
        pairs.push(("label", self.label.clone()));
        pairs.push(("model", self.model.name().into()));
        match self.model {
            CorpusModel::ErdosRenyi { n, m } | CorpusModel::Imported { n, m } => {
                pairs.push(("n", n.to_string()));
                pairs.push(("m", m.to_string()));
            }
            CorpusModel::BarabasiAlbert { n, m0, m_attach } => {
                pairs.push(("n", n.to_string()));
                pairs.push(("m0", m0.to_string()));
                pairs.push(("m_attach", m_attach.to_string()));
            }
        }
        pairs.push(("count", self.graphs.len().to_string()));
        pairs.push(("master_seed", self.master_seed.to_string()));
        let mut text = write_kv(pairs);
        for (k, labels) in &self.mappings {
            let joined: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
            text.push_str(&format!("mapping_{k:03}={}\n", joined.join(",")));
        }
        text
    }
}

/// Parsed corpus manifest.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusManifest {
    pub label: String,
    pub model: CorpusModel,
    pub count: usize,
    pub master_seed: u64,
}

impl CorpusManifest {
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let pairs = parse_kv(text).map_err(|e| GraphError::Parse { line: e.line, message: e.message })?;
        let map: BTreeMap<&str, &str> = pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let get = |k: &str| map.get(k).copied().ok_or_else(|| GraphError::Parameter(format!("manifest missing `{k}`")));
        let num = |k: &str| -> Result<usize, GraphError> {
            get(k)?.parse().map_err(|_| GraphError::Parameter(format!("manifest `{k}` is not an integer")))
        };
        let version = num("format_version")?;
        if version != CORPUS_FORMAT_VERSION as usize {
            return Err(GraphError::Unsupported(format!("corpus format_version {version}")));
        }
        let n = num("n")?;
        let model = match get("model")? {
            "er" => CorpusModel::ErdosRenyi { n, m: num("m")? },
            "ba" => CorpusModel::BarabasiAlbert { n, m0: num("m0")?, m_attach: num("m_attach")? },
            "dot" => CorpusModel::Imported { n, m: num("m")? },
            other => return Err(GraphError::Parameter(format!("unknown corpus model `{other}`"))),
        };
        let master_seed = get("master_seed")?
            .parse()
            .map_err(|_| GraphError::Parameter("manifest `master_seed` is not an integer".into()))?;
        Ok(Self { label: map.get("label").unwrap_or(&"").to_string(), model, count: num("count")?, master_seed })
    }

    /// Rebuilds the corpus graphs. Only generated corpora can be rebuilt.
    pub fn regenerate(&self) -> Result<Corpus, GraphError> {
        Corpus::generate(&self.label, self.model, self.count, self.master_seed)
    }
}
