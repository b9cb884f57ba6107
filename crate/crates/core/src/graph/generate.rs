use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::{Graph, GraphError, NodeId};
use crate::rng::SeqRng;

/// G(n, m): exactly `m` distinct edges drawn uniformly without replacement.
///
/// Uniform unordered pairs are drawn by rejection until `m` distinct edges
/// have been collected.
pub fn gen_erdos_renyi(n: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    let max_edges = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max_edges {
        return Err(GraphError::Parameter(format!("edge count {m} exceeds n(n-1)/2 = {max_edges} for n = {n}")));
    }
    if n > NodeId::MAX as usize {
        return Err(GraphError::Parameter(format!("node count {n} too large")));
    }
    let mut rng = SeqRng::new(seed);
    let mut chosen = BTreeSet::new();
    while chosen.len() < m {
        let u = rng.below(n as u64) as NodeId;
        let v = rng.below(n as u64) as NodeId;
        if u != v {
            chosen.insert((u.min(v), u.max(v)));
        }
    }
    Graph::from_edges(n, chosen)
}

/// Preferential attachment growth from a complete graph on `m0` nodes.
///
/// Every new node adds `m_attach` distinct edges; targets are drawn with
/// probability proportional to current degree and repeated targets are
/// redrawn. If every existing node has degree zero (only possible when
/// `m0 == 1`) the target is drawn uniformly.
pub fn gen_barabasi_albert(n: usize, m0: usize, m_attach: usize, seed: u64) -> Result<Graph, GraphError> {
    if m_attach < 1 || m_attach > m0 || m0 > n {
        return Err(GraphError::Parameter(format!(
            "need 1 <= m_attach <= m0 <= n, got m_attach = {m_attach}, m0 = {m0}, n = {n}"
        )));
    }
    if n > NodeId::MAX as usize {
        return Err(GraphError::Parameter(format!("node count {n} too large")));
    }
    let mut rng = SeqRng::new(seed);
    let mut edges = Vec::with_capacity(m0 * (m0 - 1) / 2 + m_attach * (n - m0));
    // every edge contributes both endpoints, so a uniform pick is degree-weighted
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * edges.capacity());
    for u in 0..m0 as NodeId {
        for v in u + 1..m0 as NodeId {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut targets: Vec<NodeId> = Vec::with_capacity(m_attach);
    for new in m0 as NodeId..n as NodeId {
        targets.clear();
        while targets.len() < m_attach {
            let t = if endpoints.is_empty() {
                rng.below(new as u64) as NodeId
            } else {
                endpoints[rng.below(endpoints.len() as u64) as usize]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, new));
            endpoints.push(t);
            endpoints.push(new);
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::degree_summary;
    use proptest::prelude::*;

    #[test]
    fn scenario_one_size() {
        let g = gen_erdos_renyi(200, 400, 11).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (200, 400));
    }

    #[test]
    fn forced_triangle() {
        let g = gen_erdos_renyi(3, 3, 99).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), [(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn er_deterministic() {
        assert_eq!(gen_erdos_renyi(10, 20, 7), gen_erdos_renyi(10, 20, 7));
        assert_ne!(gen_erdos_renyi(10, 20, 7), gen_erdos_renyi(10, 20, 8));
    }

    #[test]
    fn er_rejects_too_many_edges() {
        let err = gen_erdos_renyi(3, 4, 1).unwrap_err();
        assert!(matches!(err, GraphError::Parameter(ref m) if m.contains("n(n-1)/2 = 3")));
    }

    #[test]
    fn ba_without_growth_is_complete() {
        let g = gen_barabasi_albert(4, 4, 2, 1).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn ba_edge_count() {
        let g = gen_barabasi_albert(100, 3, 2, 1).unwrap();
        assert_eq!(g.edge_count(), 3 + 2 * 97);
    }

    #[test]
    fn ba_single_seed_node() {
        let g = gen_barabasi_albert(20, 1, 1, 4).unwrap();
        assert_eq!(g.edge_count(), 19);
        assert!(g.is_connected());
    }

    #[test]
    fn ba_rejects_bad_params() {
        assert!(gen_barabasi_albert(10, 2, 3, 0).is_err());
        assert!(gen_barabasi_albert(10, 2, 0, 0).is_err());
        assert!(gen_barabasi_albert(10, 11, 2, 0).is_err());
    }

    #[test]
    fn ba_tail_heavier_than_er() {
        for seed in 0..10 {
            let ba = gen_barabasi_albert(1000, 5, 3, 5 + seed).unwrap();
            let er = gen_erdos_renyi(1000, ba.edge_count(), 5 + seed).unwrap();
            let (b, e) = (degree_summary(&ba).unwrap(), degree_summary(&er).unwrap());
            assert!(b.max_degree > e.max_degree, "seed {seed}: {} vs {}", b.max_degree, e.max_degree);
        }
    }

    proptest! {
        #[test]
        fn er_is_simple_with_exact_edge_count(n in 1usize..40, frac in 0.0f64..=1.0, seed: u64) {
            let m = ((n * (n - 1) / 2) as f64 * frac) as usize;
            let g = gen_erdos_renyi(n, m, seed).unwrap();
            prop_assert_eq!(g.edge_count(), m);
            let edges: Vec<_> = g.edges().collect();
            prop_assert_eq!(edges.len(), m);
            prop_assert!(edges.iter().all(|&(u, v)| u < v && (v as usize) < n));
            prop_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn ba_edge_count_formula(m0 in 1usize..8, extra in 0usize..60, k in 1usize..8, seed: u64) {
            let m_attach = k.min(m0);
            let n = m0 + extra;
            let g = gen_barabasi_albert(n, m0, m_attach, seed).unwrap();
            prop_assert_eq!(g.edge_count(), m0 * (m0 - 1) / 2 + m_attach * (n - m0));
        }
    }
}
