//! Undirected simple graphs, edge-list ingestion, induced subgraphs and the
//! packed adjacency-matrix view shared by the simulator and the inference
//! engine.
//!
//! Node ids are dense `0..n`. External ids from an edge-list file are kept in
//! a side table of labels.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::Rng;

use crate::bitset::BitSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: malformed edge `{text}`")]
    Parse { line: usize, text: String },
    #[error("edge list contains no nodes")]
    Empty,
    #[error("node {node} out of range for graph with {n} nodes")]
    InvalidNode { node: usize, n: usize },
    #[error("node {node} listed more than once")]
    RepeatedNode { node: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
}

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
    labels: Option<Vec<String>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], edge_count: 0, labels: None }
    }

    /// Builds a graph from edge pairs, rejecting self-loops and ignoring
    /// duplicates.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Adds `{u, v}`; returns `false` when the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        let n = self.node_count();
        for node in [u, v] {
            if node >= n {
                return Err(GraphError::InvalidNode { node, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().copied().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External id of `v`, falling back to its dense index.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.node_count());
        self.labels = Some(labels);
    }

    /// Subgraph induced by `nodes`, relabelled `0..nodes.len()` by position.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph, GraphError> {
        let n = self.node_count();
        let mut position = vec![usize::MAX; n];
        for (k, &v) in nodes.iter().enumerate() {
            if v >= n {
                return Err(GraphError::InvalidNode { node: v, n });
            }
            if position[v] != usize::MAX {
                return Err(GraphError::RepeatedNode { node: v });
            }
            position[v] = k;
        }
        let mut sub = Graph::new(nodes.len());
        for (k, &v) in nodes.iter().enumerate() {
            for &w in &self.adj[v] {
                let pw = position[w];
                if pw != usize::MAX && pw > k {
                    sub.add_edge(k, pw)?;
                }
            }
        }
        if let Some(labels) = &self.labels {
            sub.labels = Some(nodes.iter().map(|&v| labels[v].clone()).collect());
        }
        Ok(sub)
    }

    pub fn to_adjacency(&self) -> AdjacencyMatrix {
        let mut a = AdjacencyMatrix::new(self.node_count());
        for (u, v) in self.edges() {
            a.set(u, v, true);
        }
        a
    }

    /// Serializes to the edge-list format, writing external labels when present.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{} {}", self.label(u), self.label(v));
        }
        out
    }
}

/// Result of parsing an edge list: the graph plus what was discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub graph: Graph,
    pub duplicates_dropped: usize,
    pub self_loops_dropped: usize,
}

/// Parses whitespace-separated integer pairs, one per line. Lines starting
/// with `#` and blank lines are skipped. Ids are compacted to `0..n` in
/// first-seen order; the original ids become the graph labels.
pub fn parse_edge_list(text: &str) -> Result<EdgeList, GraphError> {
    let mut ids: BTreeMap<u64, usize> = BTreeMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let parse = |t: Option<&str>| t.and_then(|t| t.parse::<u64>().ok());
        let (a, b) = match (parse(toks.next()), parse(toks.next()), toks.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(GraphError::Parse { line: lineno + 1, text: line.to_string() }),
        };
        let mut intern = |x: u64| {
            *ids.entry(x).or_insert_with(|| {
                labels.push(x.to_string());
                labels.len() - 1
            })
        };
        let (u, v) = (intern(a), intern(b));
        pairs.push((u, v));
    }
    if labels.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut graph = Graph::new(labels.len());
    let (mut dups, mut loops) = (0, 0);
    for (u, v) in pairs {
        if u == v {
            loops += 1;
        } else if !graph.add_edge(u, v)? {
            dups += 1;
        }
    }
    graph.labels = Some(labels);
    Ok(EdgeList { graph, duplicates_dropped: dups, self_loops_dropped: loops })
}

/// Preferential-attachment graph: starts from a clique on `m + 1` nodes and
/// attaches every further node to `m` distinct existing nodes chosen with
/// probability proportional to degree. Degrees are heavy-tailed.
pub fn barabasi_albert<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Graph {
    assert!(m >= 1 && n > m, "need n > m >= 1");
    let mut g = Graph::new(n);
    // each edge endpoint appears once, so uniform draws are degree-weighted
    let mut endpoints: Vec<usize> = Vec::new();
    for u in 0..=m {
        for v in (u + 1)..=m {
            g.add_edge(u, v).expect("clique edge");
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    for v in (m + 1)..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            g.add_edge(v, t).expect("new edge");
            endpoints.push(v);
            endpoints.push(t);
        }
    }
    g
}

/// Square binary matrix packed row by row. Used both for the symmetric
/// adjacency matrices and (through [`BitMatrix`]) for the coupon matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let stride = n.div_ceil(64).max(1);
        BitMatrix { n, stride, bits: vec![0; stride * n] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        (self.bits[i * self.stride + (j >> 6)] >> (j & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, on: bool) {
        assert!(i < self.n && j < self.n, "({i},{j}) out of range {}", self.n);
        let w = &mut self.bits[i * self.stride + (j >> 6)];
        let m = 1u64 << (j & 63);
        if on {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.bits[i * self.stride..(i + 1) * self.stride].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row(&self, i: usize) -> BitSet {
        BitSet::from_indices(self.n, (0..self.n).filter(|&j| self.get(i, j)))
    }
}

impl core::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "BitMatrix({})", self.n)?;
        for i in 0..self.n {
            for j in 0..self.n {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Symmetric, zero-diagonal binary matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AdjacencyMatrix {
    bits: BitMatrix,
}

impl AdjacencyMatrix {
    pub fn new(n: usize) -> Self {
        AdjacencyMatrix { bits: BitMatrix::new(n) }
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        let mut a = Self::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                a.set(i, j, true);
            }
        }
        a
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.bits.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits.get(i, j)
    }

    /// Sets both `(i, j)` and `(j, i)`. The diagonal cannot be set.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, on: bool) {
        assert_ne!(i, j, "adjacency diagonal must stay zero");
        self.bits.set(i, j, on);
        self.bits.set(j, i, on);
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.bits.row_count(i)
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.dim()).map(|i| self.degree(i)).collect()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.dim()).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    /// Upper-triangle edges `(i, j)`, `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.dim();
        (0..n).flat_map(move |i| ((i + 1)..n).filter(move |&j| self.get(i, j)).map(move |j| (i, j)))
    }

    /// Entrywise `self ≥ other`.
    pub fn dominates(&self, other: &AdjacencyMatrix) -> bool {
        self.dim() == other.dim() && other.edges().all(|(i, j)| self.get(i, j))
    }

    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new(self.dim());
        for (i, j) in self.edges() {
            g.add_edge(i, j).expect("valid adjacency");
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use rand::SeedableRng;

    fn clique4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn load_drops_duplicates() {
        let el = parse_edge_list("0 1\n1 2\n0 1\n").unwrap();
        assert_eq!(el.graph.node_count(), 3);
        assert_eq!(el.graph.edges().collect::<Vec<_>>(), [(0, 1), (1, 2)]);
        assert_eq!(el.duplicates_dropped, 1);
        assert_eq!(el.self_loops_dropped, 0);
    }

    #[test]
    fn load_drops_self_loop_but_keeps_node() {
        let el = parse_edge_list("5 5\n").unwrap();
        assert_eq!(el.graph.node_count(), 1);
        assert_eq!(el.graph.edge_count(), 0);
        assert_eq!(el.self_loops_dropped, 1);
        assert_eq!(el.graph.label(0), "5");
    }

    #[test]
    fn load_clique_degrees() {
        let text = "# clique\n10 20\n10 30\n10 40\n\n20 30\n20 40\n30 40\n";
        let el = parse_edge_list(text).unwrap();
        assert!((0..4).all(|v| el.graph.degree(v) == 3));
        // first-seen compaction
        assert_eq!(el.graph.labels().unwrap(), ["10", "20", "30", "40"]);
    }

    #[test]
    fn load_errors() {
        assert_eq!(parse_edge_list("# nothing\n\n"), Err(GraphError::Empty));
        match parse_edge_list("0 1\n1 x\n") {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list("0 1 2\n"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("-1 2\n"), Err(GraphError::Parse { .. })));
    }

    #[test]
    fn reserialization_is_idempotent() {
        let el = parse_edge_list("7 3\n3 9\n9 7\n7 3\n11 11\n").unwrap();
        let once = el.graph.to_edge_list();
        let again = parse_edge_list(&once).unwrap();
        assert_eq!(again.graph.to_edge_list(), once);
    }

    #[test]
    fn induced_examples() {
        let sub = clique4().induced_subgraph(&[0, 2]).unwrap();
        assert_eq!(sub.edges().collect::<Vec<_>>(), [(0, 1)]);

        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.induced_subgraph(&[0, 2]).unwrap().edge_count(), 0);

        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let sub = g.induced_subgraph(&[1, 2, 3]).unwrap();
        assert_eq!(sub.edges().collect::<Vec<_>>(), [(0, 1), (1, 2)]);
    }

    #[test]
    fn induced_errors() {
        let g = clique4();
        assert_eq!(g.induced_subgraph(&[0, 7]), Err(GraphError::InvalidNode { node: 7, n: 4 }));
        assert_eq!(g.induced_subgraph(&[1, 1]), Err(GraphError::RepeatedNode { node: 1 }));
    }

    #[test]
    fn adjacency_examples() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap().to_adjacency();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(tri.get(i, j), i != j);
            }
        }
        let empty = Graph::new(2).to_adjacency();
        assert_eq!(empty.edge_count(), 0);

        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap().to_adjacency();
        assert!(path.get(0, 1) && path.get(1, 0) && path.get(1, 2) && path.get(2, 1));
        assert!(!path.get(0, 2) && !path.get(2, 0));
        assert_eq!(path.degrees(), [1, 2, 1]);
    }

    #[test]
    fn induced_on_all_nodes_roundtrips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = barabasi_albert(40, 3, &mut rng);
        let all: Vec<usize> = (0..40).collect();
        assert_eq!(g.induced_subgraph(&all).unwrap().to_adjacency(), g.to_adjacency());
    }

    #[test]
    fn barabasi_albert_shape() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g = barabasi_albert(250, 3, &mut rng);
        assert_eq!(g.edge_count(), 6 + 3 * (250 - 4));
        let max_deg = (0..250).map(|v| g.degree(v)).max().unwrap();
        assert!(max_deg > 20, "expected a hub, got max degree {max_deg}");
        assert!((0..250).all(|v| g.degree(v) >= 3));
    }

    #[test]
    fn adjacency_dominance() {
        let mut a = AdjacencyMatrix::new(4);
        a.set(0, 1, true);
        let mut b = a.clone();
        b.set(2, 3, true);
        assert!(b.dominates(&a));
        assert!(!a.dominates(&b));
        assert_eq!(b.to_graph().edge_count(), 2);
    }
}
