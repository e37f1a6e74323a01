//! The CNOT block permutation on two-bit adjacency patterns.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QlError, Result};
use crate::graph::GainGraph;
use crate::product::ProductGraph;

/// Ordering of the four blocks of a two-bit product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockBasis {
    /// `(a1b1, a1b2, a2b1, a2b2)`, leftmost factor slowest.
    Natural,
    /// `(a1b1, a2b2, a2b1, a1b2)`, the ordering the CNOT matrix is written in.
    CnotOrder,
}

impl BlockBasis {
    pub fn labels(&self) -> [&'static str; 4] {
        match self {
            BlockBasis::Natural => ["a1b1", "a1b2", "a2b1", "a2b2"],
            BlockBasis::CnotOrder => ["a1b1", "a2b2", "a2b1", "a1b2"],
        }
    }

    /// Natural block index of position `k`.
    pub fn natural_index(&self, k: usize) -> usize {
        match self {
            BlockBasis::Natural => k,
            BlockBasis::CnotOrder => [0, 3, 2, 1][k],
        }
    }
}

/// A 4x4 block-level adjacency pattern tagged with its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    pub matrix: DMatrix<Complex64>,
    pub basis: BlockBasis,
}

impl BlockMatrix {
    pub fn new(matrix: DMatrix<Complex64>, basis: BlockBasis) -> Result<Self> {
        if matrix.nrows() != 4 || matrix.ncols() != 4 {
            return Err(QlError::invalid("block patterns are 4x4"));
        }
        Ok(BlockMatrix { matrix, basis })
    }

    pub fn from_real(rows: [[f64; 4]; 4], basis: BlockBasis) -> Self {
        BlockMatrix {
            matrix: DMatrix::from_fn(4, 4, |r, c| Complex64::new(rows[r][c], 0.0)),
            basis,
        }
    }

    /// Same pattern expressed in another basis.
    pub fn reorder(&self, to: BlockBasis) -> BlockMatrix {
        // position in `to` -> natural -> position in self
        let pos_in_self = |nat: usize| (0..4).find(|&k| self.basis.natural_index(k) == nat).unwrap();
        let idx: Vec<usize> = (0..4).map(|k| pos_in_self(to.natural_index(k))).collect();
        BlockMatrix {
            matrix: DMatrix::from_fn(4, 4, |r, c| self.matrix[(idx[r], idx[c])]),
            basis: to,
        }
    }

    /// The pattern as a four-vertex gain graph labelled by block names.
    /// Entries must be zero or complex units.
    pub fn to_graph(&self) -> Result<GainGraph> {
        let mut g = GainGraph::new(4);
        for r in 0..4 {
            for c in r + 1..4 {
                let z = self.matrix[(r, c)];
                if z.norm() > 0.0 {
                    g.add_edge(r, c, z)?;
                }
            }
        }
        g.with_labels(self.basis.labels().iter().map(|s| s.to_string()).collect())
    }
}

/// `U_CNOT`: swaps the second and fourth basis vectors.
pub fn u_cnot() -> DMatrix<Complex64> {
    let mut u = DMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
        u[(r, c)] = Complex64::new(1.0, 0.0);
    }
    u
}

/// `U A U^-1` for a pattern given in the CNOT ordering.
pub fn cnot_transform(a: &BlockMatrix) -> Result<BlockMatrix> {
    if a.basis != BlockBasis::CnotOrder {
        return Err(QlError::BasisMismatch {
            expected: BlockBasis::CnotOrder.labels().join(","),
            got: a.basis.labels().join(","),
        });
    }
    let u = u_cnot();
    // U is a real permutation, so U^-1 = U^T
    Ok(BlockMatrix {
        matrix: &u * &a.matrix * u.transpose(),
        basis: BlockBasis::CnotOrder,
    })
}

/// Block pairs adjacent in `after` but not in `before` (same basis),
/// reported by label.
pub fn moved_edges(before: &BlockMatrix, after: &BlockMatrix) -> Vec<(String, String)> {
    let labels = after.basis.labels();
    let b = before.reorder(after.basis);
    let mut out = Vec::new();
    for r in 0..4 {
        for c in r + 1..4 {
            if after.matrix[(r, c)].norm() > 0.0 && b.matrix[(r, c)].norm() == 0.0 {
                out.push((labels[r].to_string(), labels[c].to_string()));
            }
        }
    }
    out
}

/// Graph-level CNOT on a two-bit product: the vertices of blocks `a1b2`
/// and `a2b2` trade places (k-th with k-th), which conjugates the adjacency
/// matrix by the block permutation. Labels stay with positions.
pub fn cnot_permute_blocks(p: &ProductGraph) -> Result<GainGraph> {
    if p.block_radix != [2, 2] {
        return Err(QlError::invalid("the CNOT transform acts on two-bit products"));
    }
    let members = p.block_members();
    if members[1].len() != members[3].len() {
        return Err(QlError::invalid("blocks a1b2 and a2b2 differ in size"));
    }
    let mut perm: Vec<usize> = (0..p.n_vertices()).collect();
    for (&x, &y) in members[1].iter().zip(&members[3]) {
        perm[x] = y;
        perm[y] = x;
    }
    let mut g = GainGraph::new(p.n_vertices());
    let mut seen = BTreeSet::new();
    for (u, v, z) in p.graph.edges() {
        let (a, b) = (perm[u], perm[v]);
        if seen.insert((a.min(b), a.max(b))) {
            g.add_edge(a, b, z)?;
        }
    }
    if let Some(l) = p.graph.labels() {
        g.set_labels(l.to_vec())?;
    }
    Ok(g)
}
