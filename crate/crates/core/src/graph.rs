//! Weighted graphs, their communication topology, and the edge-list file format.
//!
//! File format: line 1 is `n m directed|undirected`, followed by `m` lines
//! `u v w` with 1-based node ids and decimal weights.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_traits::NumCast;

use crate::error::GraphError;
use crate::scalar::{fits_distance_range, Weight};

/// Node ids run from 1 to n.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge<W> {
    pub from: NodeId,
    pub to: NodeId,
    pub weight: W,
}

/// Symmetric neighbor lists of the underlying undirected communication graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    neighbors: Vec<Vec<NodeId>>,
}

impl Topology {
    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[v - 1]
    }

    pub fn is_adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Number of undirected communication links.
    pub fn link_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Immutable edge-weighted graph, directed or undirected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph<W> {
    n: usize,
    directed: bool,
    w_max: W,
    edges: Vec<Edge<W>>,
    out_adj: Vec<Vec<(NodeId, W)>>,
    in_adj: Vec<Vec<(NodeId, W)>>,
    topology: Topology,
}

impl<W: Weight> WeightedDigraph<W> {
    /// Builds and validates a graph with the default weight bound `n³`.
    pub fn new(n: usize, directed: bool, edges: Vec<Edge<W>>) -> Result<Self, GraphError> {
        let w_max = default_w_max::<W>(n)?;
        Self::with_w_max(n, directed, edges, w_max)
    }

    pub fn with_w_max(n: usize, directed: bool, edges: Vec<Edge<W>>, w_max: W) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if !fits_distance_range(n, w_max) {
            return Err(GraphError::WeightRange);
        }
        let mut seen = BTreeSet::new();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut links: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
        for e in &edges {
            let (u, v, w) = (e.from, e.to, e.weight);
            if u == 0 || v == 0 || u > n || v > n {
                return Err(GraphError::NodeOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { u });
            }
            if w.is_zero() {
                return Err(GraphError::NonPositiveWeight { u, v });
            }
            if w > w_max {
                return Err(GraphError::WeightTooLarge { u, v, w: w.to_string(), w_max: w_max.to_string() });
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            out_adj[u - 1].push((v, w));
            in_adj[v - 1].push((u, w));
            if !directed {
                out_adj[v - 1].push((u, w));
                in_adj[u - 1].push((v, w));
            }
            links[u - 1].insert(v);
            links[v - 1].insert(u);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }
        let topology = Topology { neighbors: links.into_iter().map(|s| s.into_iter().collect()).collect() };
        if let Some(unreached) = first_unreached(&topology) {
            return Err(GraphError::Disconnected { unreached });
        }
        Ok(Self { n, directed, w_max, edges, out_adj, in_adj, topology })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of edges as listed (an undirected edge counts once).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn w_max(&self) -> W {
        self.w_max
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        1..=self.n
    }

    /// Out-neighbors of `v` with weights, sorted by id. Undirected edges appear in both directions.
    pub fn out_edges(&self, v: NodeId) -> &[(NodeId, W)] {
        &self.out_adj[v - 1]
    }

    /// In-neighbors of `v` with weights, sorted by id.
    pub fn in_edges(&self, v: NodeId) -> &[(NodeId, W)] {
        &self.in_adj[v - 1]
    }

    pub fn weight(&self, from: NodeId, to: NodeId) -> Option<W> {
        let list = self.out_edges(from);
        list.binary_search_by_key(&to, |&(t, _)| t).ok().map(|i| list[i].1)
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Writes the edge-list format; `parse_graph` of the result reproduces `self`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let kind = if self.directed { "directed" } else { "undirected" };
        let _ = writeln!(out, "{} {} {}", self.n, self.edges.len(), kind);
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.from, e.to, e.weight);
        }
        out
    }
}

/// The communication topology of `g`: `u ~ v` iff an edge joins them in either orientation.
pub fn underlying_undirected<W: Weight>(g: &WeightedDigraph<W>) -> &Topology {
    g.topology()
}

/// Default weight bound `n³`.
pub fn default_w_max<W: Weight>(n: usize) -> Result<W, GraphError> {
    let cube = n.checked_mul(n).and_then(|sq| sq.checked_mul(n)).ok_or(GraphError::WeightRange)?;
    <W as NumCast>::from(cube.max(1)).ok_or(GraphError::WeightRange)
}

fn first_unreached(topo: &Topology) -> Option<NodeId> {
    let n = topo.node_count();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([1]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &v in topo.neighbors(u) {
            if !seen[v - 1] {
                seen[v - 1] = true;
                queue.push_back(v);
            }
        }
    }
    seen.iter().position(|s| !s).map(|i| i + 1)
}

/// Parses the edge-list format with the default `W_max = n³`.
pub fn parse_graph<W: Weight>(text: &str) -> Result<WeightedDigraph<W>, GraphError> {
    parse_graph_with(text, None)
}

/// Parses the edge-list format; `w_max` overrides the default bound.
pub fn parse_graph_with<W: Weight>(text: &str, w_max: Option<W>) -> Result<WeightedDigraph<W>, GraphError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(GraphError::Header { line: 1, reason: "missing header".into() })?;
    let hline = hline + 1;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, m, kind] = fields[..] else {
        return Err(GraphError::Header { line: hline, reason: format!("expected `n m directed|undirected`, got {header:?}") });
    };
    let n: usize = n.parse().map_err(|_| GraphError::Header { line: hline, reason: format!("bad node count {n:?}") })?;
    let m: usize = m.parse().map_err(|_| GraphError::Header { line: hline, reason: format!("bad edge count {m:?}") })?;
    let directed = match kind {
        "directed" => true,
        "undirected" => false,
        other => return Err(GraphError::Header { line: hline, reason: format!("unknown graph kind {other:?}") }),
    };

    let mut edges = Vec::with_capacity(m);
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v, w] = fields[..] else {
            return Err(GraphError::Edge { line: line_no, reason: format!("expected `u v w`, got {line:?}") });
        };
        let bad = |what: &str, s: &str| GraphError::Edge { line: line_no, reason: format!("bad {what} {s:?}") };
        let u: NodeId = u.parse().map_err(|_| bad("node id", u))?;
        let v: NodeId = v.parse().map_err(|_| bad("node id", v))?;
        if w.starts_with('-') || w.trim_start_matches('+').chars().all(|c| c == '0') {
            return Err(GraphError::NonPositiveWeight { u, v });
        }
        let w: W = w.parse().map_err(|_| bad("weight", w))?;
        edges.push(Edge { from: u, to: v, weight: w });
    }
    if edges.len() != m {
        return Err(GraphError::EdgeCount { declared: m, found: edges.len() });
    }
    match w_max {
        Some(w_max) => WeightedDigraph::with_w_max(n, directed, edges, w_max),
        None => WeightedDigraph::new(n, directed, edges),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G_A: &str = "3 3 directed\n1 2 1\n2 3 1\n1 3 10";

    #[test]
    fn parses_reference_graph() {
        let g = parse_graph::<u64>(G_A).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.is_directed());
        assert_eq!(g.weight(1, 3), Some(10));
        assert_eq!(g.weight(3, 1), None);
        assert_eq!(g.w_max(), 27);
    }

    #[test]
    fn rejects_zero_weight() {
        let err = parse_graph::<u64>("2 1 undirected\n1 2 0").unwrap_err();
        assert_eq!(err, GraphError::NonPositiveWeight { u: 1, v: 2 });
        let err = parse_graph::<u64>("2 1 undirected\n1 2 -4").unwrap_err();
        assert_eq!(err, GraphError::NonPositiveWeight { u: 1, v: 2 });
    }

    #[test]
    fn rejects_disconnected() {
        let err = parse_graph::<u64>("4 1 directed\n1 2 5").unwrap_err();
        assert_eq!(err, GraphError::Disconnected { unreached: 3 });
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse_graph::<u64>(""), Err(GraphError::Header { .. })));
        assert!(matches!(parse_graph::<u64>("3 two directed"), Err(GraphError::Header { .. })));
        assert!(matches!(parse_graph::<u64>("3 1 sideways\n1 2 1"), Err(GraphError::Header { .. })));
        assert!(matches!(parse_graph::<u64>("2 1 directed\n1 x 1"), Err(GraphError::Edge { line: 2, .. })));
        assert!(matches!(parse_graph::<u64>("2 1 directed\n1 2"), Err(GraphError::Edge { line: 2, .. })));
        assert_eq!(parse_graph::<u64>("2 2 directed\n1 2 1").unwrap_err(), GraphError::EdgeCount { declared: 2, found: 1 });
    }

    #[test]
    fn rejects_structural_violations() {
        assert_eq!(parse_graph::<u64>("2 1 directed\n1 1 1").unwrap_err(), GraphError::SelfLoop { u: 1 });
        assert_eq!(
            parse_graph::<u64>("2 1 directed\n1 3 1").unwrap_err(),
            GraphError::NodeOutOfRange { u: 1, v: 3, n: 2 }
        );
        assert_eq!(
            parse_graph::<u64>("2 2 directed\n1 2 1\n1 2 3").unwrap_err(),
            GraphError::DuplicateEdge { u: 1, v: 2 }
        );
        assert_eq!(
            parse_graph::<u64>("2 2 undirected\n1 2 1\n2 1 3").unwrap_err(),
            GraphError::DuplicateEdge { u: 2, v: 1 }
        );
        assert!(parse_graph::<u64>("2 2 directed\n1 2 1\n2 1 3").is_ok());
        assert!(matches!(parse_graph::<u64>("2 1 directed\n1 2 9"), Err(GraphError::WeightTooLarge { .. })));
        assert!(parse_graph_with::<u64>("2 1 directed\n1 2 5", Some(5)).is_ok());
        assert!(matches!(parse_graph_with::<u64>("2 1 directed\n1 2 6", Some(5)), Err(GraphError::WeightTooLarge { .. })));
    }

    #[test]
    fn underlying_topology_is_bidirectional() {
        let g = parse_graph::<u64>(G_A).unwrap();
        let t = underlying_undirected(&g);
        assert_eq!(t.neighbors(3), &[1, 2]);
        assert_eq!(t.neighbors(1), &[2, 3]);

        let path = parse_graph::<u64>("3 2 undirected\n1 2 1\n2 3 1").unwrap();
        assert_eq!(underlying_undirected(&path).neighbors(2), &[1, 3]);

        let k3 = parse_graph::<u64>("3 6 directed\n1 2 1\n2 1 1\n1 3 1\n3 1 1\n2 3 1\n3 2 1").unwrap();
        let t = underlying_undirected(&k3);
        assert!((1..=3).all(|v| t.neighbors(v).len() == 2));
        assert_eq!(t.link_count(), 3);
    }

    #[test]
    fn undirected_edges_are_symmetric_in_adjacency() {
        let g = parse_graph::<u32>("3 2 undirected\n1 2 5\n2 3 7").unwrap();
        assert_eq!(g.out_edges(2), &[(1, 5), (3, 7)]);
        assert_eq!(g.in_edges(2), &[(1, 5), (3, 7)]);
        assert_eq!(g.weight(3, 2), Some(7));
    }

    #[test]
    fn serialization_is_exact() {
        let g = parse_graph::<u64>(G_A).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "3 3 directed\n1 2 1\n2 3 1\n1 3 10\n");
        assert_eq!(parse_graph::<u64>(&text).unwrap(), g);
    }
}
