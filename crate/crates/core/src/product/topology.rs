//! Block quotients, hypercube recognition and Boolean posets.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_complex::Complex64;

use super::ProductGraph;
use crate::graph::GainGraph;

/// One node per block, an edge wherever two blocks share at least one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientGraph {
    pub labels: Vec<String>,
    pub tuples: Vec<Vec<usize>>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl QuotientGraph {
    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.edges.insert((a.min(b), a.max(b)));
        }
    }

    pub fn to_gain_graph(&self) -> GainGraph {
        let mut g = GainGraph::new(self.n_nodes());
        for &(a, b) in &self.edges {
            g.add_edge(a, b, Complex64::new(1.0, 0.0)).expect("quotient edges are simple");
        }
        g.with_labels(self.labels.clone()).expect("one label per node")
    }
}

pub fn quotient(p: &ProductGraph) -> QuotientGraph {
    let nb = p.n_blocks();
    let mut q = QuotientGraph {
        labels: (0..nb).map(|b| p.block_label(b)).collect(),
        tuples: (0..nb).map(|b| p.block_tuple(b)).collect(),
        edges: BTreeSet::new(),
    };
    for (u, v, _) in p.graph.edges() {
        q.add_edge(p.block_of[u], p.block_of[v]);
    }
    q
}

/// Outcome of [`hypercube_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct HypercubeReport {
    pub is_hypercube: bool,
    /// Hypercube vertex (bit mask) assigned to every node when the check
    /// succeeds; adjacent nodes differ in exactly one bit.
    pub certificate: Option<Vec<u32>>,
    pub reason: Option<String>,
}

impl HypercubeReport {
    fn no(reason: String) -> Self {
        HypercubeReport {
            is_hypercube: false,
            certificate: None,
            reason: Some(reason),
        }
    }
}

/// Decides whether `qg` is isomorphic to the `q`-cube.
///
/// Node 0 gets mask 0 and its neighbours the unit masks; every later node
/// (in BFS order) gets the union of the masks of its neighbours one layer
/// closer. The labelling is accepted only if it is a bijection onto
/// `0..2^q` mapping every edge to a single-bit flip, with `q 2^(q-1)` edges,
/// which makes it an explicit isomorphism.
pub fn hypercube_check(qg: &QuotientGraph, q: usize) -> HypercubeReport {
    let n = qg.n_nodes();
    if q >= 32 || n != 1usize << q {
        return HypercubeReport::no(format!("{n} nodes, a {q}-cube has 2^{q}"));
    }
    let want_edges = q * (n / 2);
    if qg.edges.len() != want_edges {
        return HypercubeReport::no(format!("{} edges, a {q}-cube has {want_edges}", qg.edges.len()));
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &qg.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    if let Some(v) = (0..n).find(|&v| adj[v].len() != q) {
        return HypercubeReport::no(format!("node {} has degree {}, expected {q}", qg.labels[v], adj[v].len()));
    }
    let mut dist = vec![usize::MAX; n];
    let mut mask = vec![0u32; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0usize]);
    dist[0] = 0;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if order.len() != n {
        return HypercubeReport::no("quotient is disconnected".into());
    }
    let mut next_bit = 0;
    for &v in &order[1..] {
        if dist[v] == 1 {
            mask[v] = 1 << next_bit;
            next_bit += 1;
        } else {
            mask[v] = adj[v].iter().filter(|&&w| dist[w] + 1 == dist[v]).fold(0, |m, &w| m | mask[w]);
        }
        if mask[v].count_ones() as usize != dist[v] {
            return HypercubeReport::no(format!("node {} breaks the layer structure", qg.labels[v]));
        }
    }
    let distinct: BTreeSet<u32> = mask.iter().copied().collect();
    if distinct.len() != n {
        return HypercubeReport::no("two nodes received the same cube vertex".into());
    }
    if let Some(&(a, b)) = qg.edges.iter().find(|&&(a, b)| (mask[a] ^ mask[b]).count_ones() != 1) {
        return HypercubeReport::no(format!(
            "edge {}-{} does not flip a single coordinate",
            qg.labels[a], qg.labels[b]
        ));
    }
    HypercubeReport {
        is_hypercube: true,
        certificate: Some(mask),
        reason: None,
    }
}

/// The subsets of `{1..q}` ordered by inclusion, as bit masks (element `i`
/// is bit `i - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanPoset {
    pub q: usize,
    /// Sorted by rank, then by mask.
    pub sets: Vec<u32>,
}

pub fn boolean_poset(q: usize) -> crate::error::Result<BooleanPoset> {
    if !(1..=10).contains(&q) {
        return Err(crate::error::QlError::invalid(format!("poset rank must lie in 1..=10, got {q}")));
    }
    let mut sets: Vec<u32> = (0..1u32 << q).collect();
    sets.sort_by_key(|&s| (s.count_ones(), s));
    Ok(BooleanPoset { q, sets })
}

impl BooleanPoset {
    pub fn rank(&self, s: u32) -> u32 {
        s.count_ones()
    }

    pub fn leq(&self, a: u32, b: u32) -> bool {
        a & !b == 0
    }

    pub fn comparable(&self, a: u32, b: u32) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Mask of a set given by its elements (1-based).
    pub fn set(&self, elems: &[u32]) -> u32 {
        elems.iter().fold(0, |m, &e| m | 1 << (e - 1))
    }

    /// Cover pairs `(a, b)` with `a` covered by `b`.
    pub fn covers(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for &a in &self.sets {
            for i in 0..self.q {
                if a & (1 << i) == 0 {
                    out.push((a, a | 1 << i));
                }
            }
        }
        out
    }

    /// Every inclusion pair `a <= b` with `a != b`.
    pub fn relations(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for &a in &self.sets {
            for &b in &self.sets {
                if a != b && self.leq(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn format_set(&self, s: u32) -> String {
        let elems: Vec<String> = (0..self.q).filter(|i| s & (1 << i) != 0).map(|i| (i + 1).to_string()).collect();
        format!("{{{}}}", elems.join(","))
    }

    /// Hasse diagram as a quotient-style graph (node `i` is `sets[i]`).
    pub fn hasse(&self) -> QuotientGraph {
        let pos = |m: u32| self.sets.iter().position(|&s| s == m).expect("set present");
        let mut g = QuotientGraph {
            labels: self.sets.iter().map(|&s| self.format_set(s)).collect(),
            tuples: self
                .sets
                .iter()
                .map(|&s| (0..self.q).map(|i| ((s >> i) & 1) as usize).collect())
                .collect(),
            edges: BTreeSet::new(),
        };
        for (a, b) in self.covers() {
            g.add_edge(pos(a), pos(b));
        }
        g
    }

    /// Hasse diagram in DOT, edges pointing up the order.
    pub fn hasse_dot(&self) -> String {
        let mut s = String::from("digraph Hasse {\n  rankdir=BT;\n");
        for &m in &self.sets {
            let _ = writeln!(s, "  \"{}\" [rank={}];", self.format_set(m), self.rank(m));
        }
        for (a, b) in self.covers() {
            let _ = writeln!(s, "  \"{}\" -> \"{}\";", self.format_set(a), self.format_set(b));
        }
        s.push_str("}\n");
        s
    }
}
