//! Cartesian products of QL bits and their block structure.
//!
//! Vertices of `G1 x G2 x ... x Gq` are coordinate tuples flattened with the
//! leftmost factor varying slowest. Each vertex also carries a block tuple
//! (which subgraph of each factor it sits in), flattened the same way, so
//! block `a_i b_j` of a two-bit product has index `2 (i - 1) + (j - 1)`.

mod census;
mod optimized;
mod topology;

pub use census::{zero_coupling_block_count, zero_coupling_block_count_brute};
pub use optimized::{contract_product, contract_subgraph, lift, optimized_product};
pub use topology::{boolean_poset, hypercube_check, quotient, BooleanPoset, HypercubeReport, QuotientGraph};

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QlError, Result};
use crate::graph::GainGraph;
use crate::linalg::kron_vec;
use crate::qlbit::{QlBit, QlBitSpec};
use crate::spectral::{self, EmergentState, Spectrum, DENSE_CAP};

/// Largest product the library will materialise.
pub const PRODUCT_VERTEX_CAP: usize = 200_000;
/// Largest number of bits for the composed emergent state.
pub const MAX_EMERGENT_BITS: usize = 6;

const PALETTE: [&str; 8] = ["red", "blue", "green", "orange", "purple", "brown", "cyan", "magenta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    /// Full Cartesian product; `factor_sizes` multiply to the vertex count.
    Cartesian,
    /// `2^q` blocks of `n` vertices each.
    Optimized { n: usize },
}

/// A product graph together with its block bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGraph {
    pub graph: GainGraph,
    pub kind: ProductKind,
    pub q: usize,
    /// QL bit parameters of each factor when known.
    pub factor_specs: Vec<Option<QlBitSpec>>,
    /// Vertex count of each factor (Cartesian products only).
    pub factor_sizes: Vec<usize>,
    /// Number of blocks per factor.
    pub block_radix: Vec<usize>,
    /// Flattened block tuple of every vertex.
    pub block_of: Vec<usize>,
}

impl ProductGraph {
    pub fn n_vertices(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn n_blocks(&self) -> usize {
        self.block_radix.iter().product()
    }

    /// Block tuple of a flattened block index.
    pub fn block_tuple(&self, block: usize) -> Vec<usize> {
        unflatten(block, &self.block_radix)
    }

    /// Block tuple of vertex `v`.
    pub fn block_index(&self, v: usize) -> Vec<usize> {
        self.block_tuple(self.block_of[v])
    }

    /// `"a1b2"` style name of a flattened block.
    pub fn block_label(&self, block: usize) -> String {
        block_label(&self.block_tuple(block))
    }

    /// Factor coordinates of vertex `v` (Cartesian products only).
    pub fn coordinates(&self, v: usize) -> Option<Vec<usize>> {
        match self.kind {
            ProductKind::Cartesian => Some(unflatten(v, &self.factor_sizes)),
            ProductKind::Optimized { .. } => None,
        }
    }

    /// Vertices of every block, in block order.
    pub fn block_members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_blocks()];
        for (v, &b) in self.block_of.iter().enumerate() {
            out[b].push(v);
        }
        out
    }

    /// Edges violating the product edge rule. For Cartesian products an edge
    /// must move exactly one vertex coordinate; for every product it may
    /// change at most one block coordinate.
    pub fn edge_rule_violations(&self) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for (u, v, _) in self.graph.edges() {
            let moved_blocks = differing(&self.block_index(u), &self.block_index(v));
            let ok = match self.kind {
                ProductKind::Cartesian => {
                    let cu = unflatten(u, &self.factor_sizes);
                    let cv = unflatten(v, &self.factor_sizes);
                    differing(&cu, &cv) == 1 && moved_blocks <= 1
                }
                ProductKind::Optimized { .. } => moved_blocks <= 1,
            };
            if !ok {
                bad.push((u, v));
            }
        }
        bad
    }

    /// Emergent state of the materialised graph projected on its blocks.
    pub fn emergent_state(&self) -> Result<EmergentState> {
        spectral::emergent_state_of(&self.graph.to_sparse(), &self.block_of, self.n_blocks())
    }

    /// DOT with inter-block edges coloured by the factor they move along.
    pub fn to_dot(&self) -> String {
        crate::io::to_dot_with(&self.graph, |u, v| {
            let (bu, bv) = (self.block_index(u), self.block_index(v));
            if bu == bv {
                return None;
            }
            let moved: Vec<usize> = (0..bu.len()).filter(|&k| bu[k] != bv[k]).collect();
            Some(if moved.len() == 1 {
                PALETTE[moved[0] % PALETTE.len()].to_string()
            } else {
                "black".to_string()
            })
        })
    }

    /// JSON descriptor: factors, block labels and the block of every vertex.
    pub fn descriptor(&self) -> serde_json::Value {
        let kind = match self.kind {
            ProductKind::Cartesian => serde_json::json!({"type": "cartesian"}),
            ProductKind::Optimized { n } => serde_json::json!({"type": "optimized", "n": n}),
        };
        serde_json::json!({
            "q": self.q,
            "kind": kind,
            "factor_sizes": self.factor_sizes,
            "factors": self.factor_specs,
            "blocks": (0..self.n_blocks()).map(|b| self.block_label(b)).collect::<Vec<_>>(),
            "block_index": self.block_of,
        })
    }
}

pub(crate) fn unflatten(mut x: usize, radix: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radix.len()];
    for k in (0..radix.len()).rev() {
        out[k] = x % radix[k];
        x /= radix[k];
    }
    out
}

pub(crate) fn flatten(t: &[usize], radix: &[usize]) -> usize {
    t.iter().zip(radix).fold(0, |acc, (&x, &r)| acc * r + x)
}

fn differing(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// `[0, 1] -> "a1b2"`: factor `k` is the `k`-th letter, blocks count from 1.
pub fn block_label(tuple: &[usize]) -> String {
    tuple
        .iter()
        .enumerate()
        .map(|(k, &b)| format!("{}{}", factor_letter(k), b + 1))
        .collect()
}

fn factor_letter(k: usize) -> String {
    if k < 26 {
        char::from(b'a' + k as u8).to_string()
    } else {
        format!("f{k}_")
    }
}

/// Cartesian product of two gain graphs. Factor blocks come from vertex
/// labels (an unlabelled factor is one block).
pub fn cartesian_product(g: &GainGraph, h: &GainGraph) -> Result<ProductGraph> {
    cartesian_product_all(&[g, h], vec![None, None])
}

/// Cartesian product of QL bits with their specs recorded.
pub fn product_of_bits(bits: &[QlBit]) -> Result<ProductGraph> {
    let graphs: Vec<&GainGraph> = bits.iter().map(|b| &b.graph).collect();
    cartesian_product_all(&graphs, bits.iter().map(|b| Some(b.spec)).collect())
}

/// Cartesian product of any number of factors, leftmost slowest.
pub fn cartesian_product_all(factors: &[&GainGraph], specs: Vec<Option<QlBitSpec>>) -> Result<ProductGraph> {
    if factors.is_empty() {
        return Err(QlError::invalid("a product needs at least one factor"));
    }
    if specs.len() != factors.len() {
        return Err(QlError::invalid("one spec slot per factor required"));
    }
    let sizes: Vec<usize> = factors.iter().map(|g| g.n_vertices()).collect();
    let mut total: usize = 1;
    for &s in &sizes {
        total = total
            .checked_mul(s)
            .filter(|&t| t <= PRODUCT_VERTEX_CAP)
            .ok_or(QlError::ProductTooLarge {
                vertices: sizes.iter().fold(1usize, |a, &b| a.saturating_mul(b)),
                cap: PRODUCT_VERTEX_CAP,
            })?;
    }
    let q = factors.len();
    let mut strides = vec![1usize; q];
    for k in (0..q.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * sizes[k + 1];
    }

    let mut edges = BTreeMap::new();
    for (k, g) in factors.iter().enumerate() {
        let (sk, st) = (sizes[k], strides[k]);
        let outer = total / (sk * st);
        for (u, v, z) in g.edges() {
            for hi in 0..outer {
                for lo in 0..st {
                    let base = hi * sk * st + lo;
                    edges.insert((base + u * st, base + v * st), z);
                }
            }
        }
    }

    let factor_blocks: Vec<Vec<usize>> = factors.iter().map(|g| g.blocks().1).collect();
    let radix: Vec<usize> = factors.iter().map(|g| g.blocks().0.len()).collect();
    let mut block_of = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for w in 0..total {
        let coords = unflatten(w, &sizes);
        let tuple: Vec<usize> = coords.iter().enumerate().map(|(k, &x)| factor_blocks[k][x]).collect();
        block_of.push(flatten(&tuple, &radix));
        labels.push(block_label(&tuple));
    }
    Ok(ProductGraph {
        graph: GainGraph::from_parts(total, edges, Some(labels)),
        kind: ProductKind::Cartesian,
        q,
        factor_specs: specs,
        factor_sizes: sizes,
        block_radix: radix,
        block_of,
    })
}

/// Spectrum of `G x H` from the factor spectra: eigenvalues `l_i + m_j` with
/// eigenvectors `X_i (x) Y_j`, sorted descending (stable in `(i, j)`).
pub fn compose_spectrum(sg: &Spectrum, sh: &Spectrum) -> Result<Spectrum> {
    let (n, m) = (sg.len(), sh.len());
    if n * m > DENSE_CAP {
        return Err(QlError::TooLarge { dim: n * m, cap: DENSE_CAP });
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            pairs.push((sg.eigenvalues[i] + sh.eigenvalues[j], i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut vectors = DMatrix::zeros(n * m, n * m);
    for (col, &(_, i, j)) in pairs.iter().enumerate() {
        let v = kron_vec(&sg.vector(i), &sh.vector(j));
        for (r, z) in v.into_iter().enumerate() {
            vectors[(r, col)] = z;
        }
    }
    Ok(Spectrum {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        eigenvectors: vectors,
    })
}

/// Emergent state of the product of `bits`, assembled from the factors:
/// eigenvalue is the sum, projection the tensor product of the factor
/// projections, gap the smallest factor gap.
pub fn emergent_product_state(bits: &[QlBit]) -> Result<EmergentState> {
    if bits.is_empty() || bits.len() > MAX_EMERGENT_BITS {
        return Err(QlError::invalid(format!(
            "emergent product state supports 1..={MAX_EMERGENT_BITS} bits, got {}",
            bits.len()
        )));
    }
    let mut eigenvalue = 0.0;
    let mut gap = f64::INFINITY;
    let mut projection = vec![Complex64::new(1.0, 0.0)];
    for bit in bits {
        let s = spectral::ql_bit_emergent_state(bit)?;
        eigenvalue += s.eigenvalue;
        gap = gap.min(s.gap);
        projection = kron_vec(&projection, &s.projection);
    }
    crate::linalg::fix_phase(&mut projection, 1e-12);
    Ok(EmergentState {
        eigenvalue,
        gap,
        projection,
        vector: None,
    })
}
