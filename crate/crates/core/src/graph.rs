//! Complex unit gain graphs.
//!
//! A gain graph is a simple undirected graph whose edges carry a unit-modulus
//! complex number. Traversing an edge backwards picks up the conjugate gain, so
//! the adjacency matrix is Hermitian by construction. Edges are stored once,
//! keyed by `(low, high)` vertex index, with the gain oriented low -> high.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QlError, Result};
use crate::linalg::SparseHermitian;

/// Allowed deviation of `|z|` from 1 for an edge gain.
pub const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GainGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), Complex64>,
    labels: Option<Vec<String>>,
}

impl GainGraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        GainGraph {
            n,
            edges: BTreeMap::new(),
            labels: None,
        }
    }

    /// Builds a graph from `(u, v, gain)` triples, gains oriented u -> v.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut g = GainGraph::new(n);
        for (u, v, z) in edges {
            g.add_edge(u, v, z)?;
        }
        Ok(g)
    }

    /// Complete graph on `n` vertices with all gains 1.
    pub fn complete(n: usize) -> Self {
        let mut g = GainGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.edges.insert((u, v), Complex64::new(1.0, 0.0));
            }
        }
        g
    }

    /// Cycle on `n >= 3` vertices with all gains 1.
    pub fn cycle(n: usize) -> Self {
        let mut g = GainGraph::new(n);
        for u in 0..n {
            let v = (u + 1) % n;
            g.edges.insert((u.min(v), u.max(v)), Complex64::new(1.0, 0.0));
        }
        g
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Inserts the edge `u -- v` carrying gain `z` from `u` to `v`.
    ///
    /// Rejects self-loops, out-of-range endpoints, non-unit gains and
    /// repeated edges.
    pub fn add_edge(&mut self, u: usize, v: usize, z: Complex64) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(QlError::invalid(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.n
            )));
        }
        if u == v {
            return Err(QlError::invalid(format!("self-loop at vertex {u}")));
        }
        if !is_unit(z) {
            return Err(QlError::NonUnitGain {
                u,
                v,
                re: z.re,
                im: z.im,
            });
        }
        let (key, gain) = orient(u, v, z);
        if self.edges.insert(key, gain).is_some() {
            return Err(QlError::invalid(format!(
                "duplicate edge ({}, {})",
                key.0, key.1
            )));
        }
        Ok(())
    }

    /// Gain on the edge read from `u` to `v`, if the edge exists.
    pub fn gain(&self, u: usize, v: usize) -> Option<Complex64> {
        if u < v {
            self.edges.get(&(u, v)).copied()
        } else {
            self.edges.get(&(v, u)).map(|z| z.conj())
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains_key(&(u.min(v), u.max(v)))
    }

    /// Stored edges as `(low, high, gain low -> high)` in key order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.edges.iter().map(|(&(u, v), &z)| (u, v, z))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in self.edges.keys() {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Neighbour lists, each sorted ascending.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in self.edges.keys() {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Attaches one tag per vertex (typically the subgraph name).
    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.n {
            return Err(QlError::invalid(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        self.set_labels(labels)?;
        Ok(self)
    }

    /// Groups vertices by label in order of first appearance. Unlabelled
    /// graphs form a single block named `"all"`.
    pub fn blocks(&self) -> (Vec<String>, Vec<usize>) {
        match &self.labels {
            None => (vec!["all".to_string()], vec![0; self.n]),
            Some(labels) => {
                let mut names: Vec<String> = Vec::new();
                let mut block_of = Vec::with_capacity(self.n);
                for l in labels {
                    let idx = match names.iter().position(|x| x == l) {
                        Some(i) => i,
                        None => {
                            names.push(l.clone());
                            names.len() - 1
                        }
                    };
                    block_of.push(idx);
                }
                (names, block_of)
            }
        }
    }

    /// Dense Hermitian adjacency matrix.
    pub fn adjacency_matrix(&self) -> DMatrix<Complex64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for (&(u, v), &z) in &self.edges {
            a[(u, v)] = z;
            a[(v, u)] = z.conj();
        }
        a
    }

    /// Sparse Hermitian adjacency.
    pub fn to_sparse(&self) -> SparseHermitian {
        SparseHermitian::from_edges(self.n, self.edges().map(|(u, v, z)| (u, v, z)))
    }

    /// Returns a copy with every gain replaced by `f(u, v, gain)`.
    ///
    /// The result must still be a unit gain graph.
    pub fn map_gains<F>(&self, mut f: F) -> Result<GainGraph>
    where
        F: FnMut(usize, usize, Complex64) -> Complex64,
    {
        let mut edges = BTreeMap::new();
        for (&(u, v), &z) in &self.edges {
            let w = f(u, v, z);
            if !is_unit(w) {
                return Err(QlError::NonUnitGain {
                    u,
                    v,
                    re: w.re,
                    im: w.im,
                });
            }
            edges.insert((u, v), w);
        }
        Ok(GainGraph {
            n: self.n,
            edges,
            labels: self.labels.clone(),
        })
    }

    /// Weighted view with every adjacency entry multiplied by `factor > 0`.
    pub fn scale_edges(&self, factor: f64) -> Result<ScaledGraph<'_>> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(QlError::invalid(format!(
                "edge scale factor must be positive, got {factor}"
            )));
        }
        Ok(ScaledGraph {
            graph: self,
            factor,
        })
    }

    /// Disjoint union; the vertices of `other` are shifted by `self.n`.
    pub fn disjoint_union(&self, other: &GainGraph) -> GainGraph {
        let mut edges = self.edges.clone();
        for (&(u, v), &z) in &other.edges {
            edges.insert((u + self.n, v + self.n), z);
        }
        let labels = match (&self.labels, &other.labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        GainGraph {
            n: self.n + other.n,
            edges,
            labels,
        }
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        for (&(u, v), &z) in &self.edges {
            if u >= v || v >= self.n {
                return Err(QlError::invalid(format!("malformed edge key ({u}, {v})")));
            }
            if !is_unit(z) {
                return Err(QlError::NonUnitGain {
                    u,
                    v,
                    re: z.re,
                    im: z.im,
                });
            }
        }
        if let Some(l) = &self.labels {
            if l.len() != self.n {
                return Err(QlError::invalid("label count does not match vertex count"));
            }
        }
        Ok(())
    }

    /// Connected components ignoring gains: `(count, component id per vertex)`.
    /// Component ids are assigned in order of their smallest vertex.
    pub fn connected_components(&self) -> (usize, Vec<usize>) {
        connected_components(self.n, self.edges.keys().copied())
    }

    pub(crate) fn from_parts(
        n: usize,
        edges: BTreeMap<(usize, usize), Complex64>,
        labels: Option<Vec<String>>,
    ) -> Self {
        GainGraph { n, edges, labels }
    }
}

/// Union-find component census over an edge list.
pub fn connected_components<I>(n: usize, edges: I) -> (usize, Vec<usize>)
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            // smaller root wins so ids follow vertex order
            let (lo, hi) = (ru.min(rv), ru.max(rv));
            parent[hi] = lo;
        }
    }
    let mut id_of_root = vec![usize::MAX; n];
    let mut labels = vec![0; n];
    let mut count = 0;
    for v in 0..n {
        let r = find(&mut parent, v);
        if id_of_root[r] == usize::MAX {
            id_of_root[r] = count;
            count += 1;
        }
        labels[v] = id_of_root[r];
    }
    (count, labels)
}

/// Adjacency view of a gain graph with all entries scaled by a positive factor.
#[derive(Debug, Clone, Copy)]
pub struct ScaledGraph<'a> {
    graph: &'a GainGraph,
    factor: f64,
}

impl ScaledGraph<'_> {
    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn graph(&self) -> &GainGraph {
        self.graph
    }

    pub fn adjacency_matrix(&self) -> DMatrix<Complex64> {
        self.graph.adjacency_matrix() * Complex64::new(self.factor, 0.0)
    }

    pub fn to_sparse(&self) -> SparseHermitian {
        let f = self.factor;
        SparseHermitian::from_edges(
            self.graph.n_vertices(),
            self.graph.edges().map(|(u, v, z)| (u, v, z * f)),
        )
    }
}

pub(crate) fn is_unit(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite() && (z.norm() - 1.0).abs() < UNIT_TOLERANCE
}

fn orient(u: usize, v: usize, z: Complex64) -> ((usize, usize), Complex64) {
    if u < v {
        ((u, v), z)
    } else {
        ((v, u), z.conj())
    }
}
