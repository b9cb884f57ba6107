//! The dot subset used for topology interchange.
//!
//! ```text
//! graph <identifier> {
//! <u> -- <v>;
//! <u>;
//! }
//! ```
//!
//! Node ids are decimal. On import, whitespace is free-form, `//` starts a
//! comment running to end of line and the trailing `;` is optional. Anything
//! else from the full dot grammar is rejected.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::{Graph, GraphError, NodeId};

/// A graph read from dot text plus the original id of every normalized node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImportedGraph {
    pub graph: Graph,
    /// `labels[i]` is the id node `i` carried in the source text.
    pub labels: Vec<u64>,
}

impl ImportedGraph {
    /// True when normalization left every id unchanged.
    pub fn is_identity(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| i as u64 == l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Undirected,
    Directed,
    Semi,
    Other(char),
}

fn tokenize(text: &str) -> Vec<(usize, Tok)> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split("//").next().unwrap_or("");
        let mut chars = line.char_indices().peekable();
        while let Some((start, c)) = chars.next() {
            let tok = match c {
                c if c.is_whitespace() => continue,
                '{' => Tok::Open,
                '}' => Tok::Close,
                ';' => Tok::Semi,
                '-' => match chars.peek().map(|&(_, c)| c) {
                    Some('-') => {
                        chars.next();
                        Tok::Undirected
                    }
                    Some('>') => {
                        chars.next();
                        Tok::Directed
                    }
                    _ => Tok::Other('-'),
                },
                c if c.is_ascii_alphanumeric() || c == '_' => {
                    let mut end = start + c.len_utf8();
                    while let Some(&(i, c)) = chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            end = i + c.len_utf8();
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    Tok::Word(line[start..end].to_string())
                }
                other => Tok::Other(other),
            };
            out.push((line_no, tok));
        }
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, message: message.into() }
}

fn node_id(line: usize, word: &str) -> Result<u64, GraphError> {
    if !word.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(line, format!("expected decimal node id, found `{word}`")));
    }
    word.parse().map_err(|_| parse_err(line, format!("node id `{word}` too large")))
}

/// Parses the dot subset. Ids are renumbered `0..n` in ascending numeric
/// order of the source ids, so already-contiguous ids are kept as they are.
pub fn import_dot(text: &str) -> Result<ImportedGraph, GraphError> {
    let toks = tokenize(text);
    let mut it = toks.into_iter().peekable();
    let last_line = text.lines().count().max(1);

    match it.next() {
        Some((_, Tok::Word(w))) if w == "graph" => {}
        Some((_, Tok::Word(w))) if w == "digraph" => {
            return Err(GraphError::Unsupported("directed graphs are not supported".into()))
        }
        Some((line, Tok::Word(w))) if w == "strict" => {
            return Err(parse_err(line, "`strict` graphs are outside the supported dot subset"))
        }
        Some((line, t)) => return Err(parse_err(line, format!("expected `graph`, found {t:?}"))),
        None => return Err(parse_err(last_line, "empty input")),
    }
    if let Some((_, Tok::Word(_))) = it.peek() {
        it.next();
    }
    match it.next() {
        Some((_, Tok::Open)) => {}
        Some((line, t)) => return Err(parse_err(line, format!("expected `{{`, found {t:?}"))),
        None => return Err(parse_err(last_line, "missing `{`")),
    }

    let mut raw_edges: Vec<(usize, u64, u64)> = Vec::new();
    let mut ids: BTreeMap<u64, NodeId> = BTreeMap::new();
    let mut closed = false;
    while let Some((line, tok)) = it.next() {
        match tok {
            Tok::Close => {
                closed = true;
                break;
            }
            Tok::Word(w) => {
                let u = node_id(line, &w)?;
                ids.insert(u, 0);
                match it.peek().cloned() {
                    Some((_, Tok::Undirected)) => {
                        it.next();
                        let v = match it.next() {
                            Some((l, Tok::Word(w))) => node_id(l, &w)?,
                            Some((l, t)) => return Err(parse_err(l, format!("expected node id, found {t:?}"))),
                            None => return Err(parse_err(line, "edge statement cut short")),
                        };
                        ids.insert(v, 0);
                        raw_edges.push((line, u, v));
                    }
                    Some((_, Tok::Directed)) => {
                        return Err(GraphError::Unsupported(format!("line {line}: directed edge `->`")))
                    }
                    _ => {}
                }
                if let Some((_, Tok::Semi)) = it.peek() {
                    it.next();
                }
            }
            Tok::Semi => {}
            Tok::Directed => return Err(GraphError::Unsupported(format!("line {line}: directed edge `->`"))),
            other => return Err(parse_err(line, format!("unexpected {other:?}"))),
        }
    }
    if !closed {
        return Err(parse_err(last_line, "missing closing `}`"));
    }
    if let Some((line, t)) = it.next() {
        return Err(parse_err(line, format!("trailing content after `}}`: {t:?}")));
    }

    let mut labels = Vec::with_capacity(ids.len());
    for (i, (label, slot)) in ids.iter_mut().enumerate() {
        *slot = i as NodeId;
        labels.push(*label);
    }
    let mut edges = Vec::with_capacity(raw_edges.len());
    for &(line, u, v) in &raw_edges {
        if u == v {
            return Err(parse_err(line, format!("self-loop on node {u}")));
        }
        edges.push((ids[&u], ids[&v]));
    }
    match Graph::from_edges(labels.len(), edges) {
        Ok(graph) => Ok(ImportedGraph { graph, labels }),
        Err(GraphError::DuplicateEdge(a, b)) => {
            let (la, lb) = (labels[a as usize], labels[b as usize]);
            let line = raw_edges
                .iter()
                .filter(|&&(_, u, v)| (u.min(v), u.max(v)) == (la.min(lb), la.max(lb)))
                .nth(1)
                .map_or(last_line, |e| e.0);
            Err(parse_err(line, format!("duplicate edge {la} -- {lb}")))
        }
        Err(e) => Err(e),
    }
}

/// Canonical dot text: edges sorted by `(min, max)`, one per line, then one
/// `<u>;` line per isolated node. Equal graphs give identical bytes.
pub fn export_dot(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + g.edge_count() * 12);
    out.push_str("graph G {\n");
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} -- {v};");
    }
    for u in 0..g.node_count() as NodeId {
        if g.degree(u) == 0 {
            let _ = writeln!(out, "{u};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_barabasi_albert, gen_erdos_renyi};
    use proptest::prelude::*;

    #[test]
    fn reads_inline_statements() {
        let g = import_dot("graph G { 0 -- 1; 1 -- 2; }").unwrap().graph;
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
    }

    #[test]
    fn empty_graph() {
        let g = import_dot("graph G { }").unwrap().graph;
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
        assert_eq!(export_dot(&g), "graph G {\n}\n");
    }

    #[test]
    fn triangle_export_is_canonical() {
        let g = Graph::from_edges(3, [(1, 2), (2, 0), (0, 1)]).unwrap();
        assert_eq!(export_dot(&g), "graph G {\n0 -- 1;\n0 -- 2;\n1 -- 2;\n}\n");
    }

    #[test]
    fn isolated_nodes_and_comments() {
        let text = "graph net {\n  // header comment\n  0 -- 2 ; // trailing\n  1;\n  3\n}\n";
        let g = import_dot(text).unwrap();
        assert_eq!(g.graph.node_count(), 4);
        assert_eq!(g.graph.edge_count(), 1);
        assert!(g.is_identity());
        assert_eq!(export_dot(&g.graph), "graph G {\n0 -- 2;\n1;\n3;\n}\n");
    }

    #[test]
    fn sparse_ids_are_normalized() {
        let g = import_dot("graph G {\n10 -- 30;\n30 -- 20;\n}").unwrap();
        assert_eq!(g.labels, [10, 20, 30]);
        assert!(g.graph.has_edge(0, 2) && g.graph.has_edge(1, 2));
        assert!(!g.is_identity());
    }

    #[test]
    fn digraph_is_unsupported() {
        assert!(matches!(import_dot("digraph G { 0 -> 1; }"), Err(GraphError::Unsupported(_))));
        assert!(matches!(import_dot("graph G { 0 -> 1; }"), Err(GraphError::Unsupported(_))));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let err = import_dot("graph G {\n0 -- 1;\n0 -- x1;\n}").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "{err:?}");
        let err = import_dot("graph G {\n0 -- 1;\n2 [color=red];\n}").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "{err:?}");
        let err = import_dot("graph G {\n0 -- 1;\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { .. }), "{err:?}");
        let err = import_dot("graph G {\n1 -- 1;\n}").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }), "{err:?}");
        let err = import_dot("graph G {\n0 -- 1;\n1 -- 0;\n}").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn generated_corpus_round_trips() {
        for seed in 0..5 {
            for g in [gen_erdos_renyi(60, 90, seed).unwrap(), gen_barabasi_albert(60, 3, 2, seed).unwrap()] {
                let text = export_dot(&g);
                let back = import_dot(&text).unwrap();
                assert_eq!(back.graph, g);
                assert_eq!(export_dot(&back.graph), text);
            }
        }
    }

    proptest! {
        #[test]
        fn export_then_import_is_identity(n in 1usize..30, frac in 0.0f64..=1.0, seed: u64) {
            let m = ((n * (n - 1) / 2) as f64 * frac) as usize;
            let g = gen_erdos_renyi(n, m, seed).unwrap();
            let back = import_dot(&export_dot(&g)).unwrap();
            prop_assert!(back.is_identity());
            prop_assert_eq!(back.graph, g);
        }
    }
}
