//! Undirected simple graphs: generation, dot interchange, degree statistics
//! and corpus descriptions.

mod corpus;
mod dot;
mod generate;

pub use corpus::{Corpus, CorpusManifest, CorpusModel, CORPUS_FORMAT_VERSION};
pub use dot::{export_dot, import_dot, ImportedGraph};
pub use generate::{gen_barabasi_albert, gen_erdos_renyi};

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0} -- {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("graph has no nodes")]
    Empty,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported format: {0}")]
    Unsupported(String),
}

/// Immutable undirected simple graph stored as sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self { adjacency: vec![Vec::new(); n], edge_count: 0 }
    }

    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, v) in edges {
            for node in [u, v] {
                if node as usize >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
            edge_count += 1;
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u as NodeId, w[0]);
                return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
            }
        }
        Ok(Self { adjacency, edge_count })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbors of `node` in ascending id order.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node as usize]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node as usize].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency.get(u as usize).is_some_and(|l| l.binary_search(&v).is_ok())
    }

    /// Edges as `(min, max)` pairs sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let u = u as NodeId;
            list.iter().copied().filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source as usize] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize].unwrap_or(0);
            for &w in self.neighbors(u) {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() == 0 || self.bfs_distances(0).iter().all(Option::is_some)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeSummary {
    /// `2e/n`, the textbook mean degree.
    pub mean_degree_std: f64,
    /// `e/n`, the value fed to the TTL estimate.
    pub lambda_ttl: f64,
    pub min_degree: usize,
    pub max_degree: usize,
}

pub fn degree_summary(g: &Graph) -> Result<DegreeSummary, GraphError> {
    let n = g.node_count();
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let lambda_ttl = g.edge_count() as f64 / n as f64;
    let degrees = (0..n as NodeId).map(|u| g.degree(u));
    let min_degree = degrees.clone().min().unwrap_or(0);
    let max_degree = degrees.max().unwrap_or(0);
    Ok(DegreeSummary { mean_degree_std: 2.0 * lambda_ttl, lambda_ttl, min_degree, max_degree })
}

/// `ceil(ln n / ln lambda)`, the approximate diameter used as hop budget.
///
/// Ratios within 1e-9 of an integer are treated as that integer so exact
/// powers (16 over base 4) are not pushed up by rounding noise.
pub fn ttl_estimate(n: usize, lambda: f64) -> Result<u32, GraphError> {
    if n < 2 {
        return Err(GraphError::Domain(alloc::format!("ttl estimate needs n >= 2, got {n}")));
    }
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(GraphError::Domain(alloc::format!("ttl estimate needs lambda > 1, got {lambda}")));
    }
    let ratio = libm::log(n as f64) / libm::log(lambda);
    let nearest = libm::round(ratio);
    let ttl = if libm::fabs(ratio - nearest) < 1e-9 { nearest } else { libm::ceil(ratio) };
    Ok(ttl as u32)
}

/// TTL for a graph using `lambda = e/n`.
pub fn ttl_auto(g: &Graph) -> Result<u32, GraphError> {
    let summary = degree_summary(g)?;
    ttl_estimate(g.node_count(), summary.lambda_ttl)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(Graph::from_edges(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(Graph::from_edges(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert!(matches!(Graph::from_edges(2, [(0, 2)]), Err(GraphError::NodeOutOfRange { .. })));
    }

    #[test]
    fn triangle_summary() {
        let s = degree_summary(&triangle()).unwrap();
        assert_eq!(s.mean_degree_std, 2.0);
        assert_eq!(s.lambda_ttl, 1.0);
        assert_eq!(s.mean_degree_std, 2.0 * s.lambda_ttl);
    }

    #[test]
    fn star_summary() {
        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let s = degree_summary(&star).unwrap();
        assert_eq!((s.min_degree, s.max_degree), (1, 4));
    }

    #[test]
    fn lambda_for_scenario_four() {
        let g = gen_erdos_renyi(500, 1000, 3).unwrap();
        assert_eq!(degree_summary(&g).unwrap().lambda_ttl, 2.0);
    }

    #[test]
    fn empty_graph_has_no_summary() {
        assert_eq!(degree_summary(&Graph::empty(0)), Err(GraphError::Empty));
    }

    #[test]
    fn ttl_values() {
        assert_eq!(ttl_estimate(200, 2.0), Ok(8));
        assert_eq!(ttl_estimate(500, 2.0), Ok(9));
        assert_eq!(ttl_estimate(16, 4.0), Ok(2));
        assert!(matches!(ttl_estimate(16, 1.0), Err(GraphError::Domain(_))));
        assert!(matches!(ttl_estimate(16, 0.5), Err(GraphError::Domain(_))));
        assert!(matches!(ttl_estimate(1, 2.0), Err(GraphError::Domain(_))));
    }

    #[test]
    fn bfs_on_path() {
        let path = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(path.bfs_distances(0), vec![Some(0), Some(1), Some(2), Some(3)]);
        assert!(path.is_connected());
        assert!(!Graph::empty(2).is_connected());
    }

    #[test]
    fn edges_sorted() {
        let e: Vec<_> = triangle().edges().collect();
        assert_eq!(e, vec![(0, 1), (0, 2), (1, 2)]);
    }
}
