//! Spectra of gain graphs and their emergent states.
//!
//! The emergent state of a graph is its top eigenpair when that eigenvalue is
//! separated from the rest of the spectrum. Projecting it onto a vertex
//! partition (sum of amplitudes per block, then normalisation) gives the
//! low-dimensional state the graph encodes: two coefficients for a QL bit,
//! `2^q` for a product of `q` bits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QlError, Result};
use crate::graph::GainGraph;
use crate::linalg::{self, fix_phase, jacobi_eigh, lanczos_top, SparseHermitian};
use crate::qlbit::QlBit;

/// Largest matrix the dense eigensolver accepts.
pub const DENSE_CAP: usize = 4096;
/// Accepted deviation from Hermiticity on input.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// Minimum gap for an eigenvalue to count as distinguished.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;
/// Up to this size emergent states use the dense solver; above it Lanczos.
pub const DENSE_EMERGENT_LIMIT: usize = 256;

const LANCZOS_TOL: f64 = 1e-11;
const LANCZOS_SEED: u64 = 0x51_6c_62_69_74;
const TIE_TOLERANCE: f64 = 1e-9;

/// Full eigendecomposition, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k).iter().copied().collect()
    }

    /// Worst `||A v - lambda v||_inf` over all pairs.
    pub fn max_residual(&self, a: &DMatrix<Complex64>) -> f64 {
        let mut worst = 0.0f64;
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(k);
            let r = a * v - v * Complex64::new(lam, 0.0);
            worst = worst.max(r.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        worst
    }

    /// CSV dump, one eigenvalue per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, v) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{i},{v:.15e}\n"));
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi.
///
/// Eigenvalues come out descending. Every eigenvector is phase fixed (first
/// component above 1e-12 in modulus made real positive); within a cluster of
/// equal eigenvalues vectors are ordered lexicographically by their
/// components.
pub fn eigendecompose(a: &DMatrix<Complex64>) -> Result<Spectrum> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(QlError::invalid(format!("matrix is {}x{}", n, a.ncols())));
    }
    if n > DENSE_CAP {
        return Err(QlError::TooLarge { dim: n, cap: DENSE_CAP });
    }
    let asym = linalg::max_asymmetry(a);
    if asym > HERMITIAN_TOLERANCE {
        return Err(QlError::NotHermitian { max_asymmetry: asym });
    }
    let (values, vectors) = jacobi_eigh(a)?;
    let mut pairs: Vec<(f64, Vec<Complex64>)> = values
        .into_iter()
        .enumerate()
        .map(|(k, lam)| {
            let mut v: Vec<Complex64> = vectors.column(k).iter().copied().collect();
            fix_phase(&mut v, 1e-12);
            (lam, v)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    // lexicographic tie-break inside clusters of equal eigenvalues
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end - 1].0 - pairs[end].0).abs() < TIE_TOLERANCE {
            end += 1;
        }
        pairs[start..end].sort_by(|x, y| lexicographic(&x.1, &y.1));
        start = end;
    }

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| pairs[c].1[r]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Spectrum of a graph's adjacency matrix.
pub fn graph_spectrum(g: &GainGraph) -> Result<Spectrum> {
    eigendecompose(&g.adjacency_matrix())
}

/// Top eigenpair of a graph together with its block projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmergentState {
    pub eigenvalue: f64,
    /// Distance from the top eigenvalue to the next one.
    pub gap: f64,
    /// One coefficient per block, unit norm, phase fixed.
    pub projection: Vec<Complex64>,
    /// Full eigenvector; omitted for states assembled from factors.
    #[serde(skip)]
    pub vector: Option<Vec<Complex64>>,
}

impl EmergentState {
    /// JSON record `{eigenvalue, gap, projection: [{re, im}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "eigenvalue": self.eigenvalue,
            "gap": self.gap,
            "projection": self
                .projection
                .iter()
                .map(|z| serde_json::json!({"re": z.re, "im": z.im}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Sums the amplitudes of `vector` over each block and normalises.
pub fn block_projection(vector: &[Complex64], block_of: &[usize], n_blocks: usize) -> Result<Vec<Complex64>> {
    if vector.len() != block_of.len() {
        return Err(QlError::invalid(format!(
            "partition covers {} vertices, vector has {}",
            block_of.len(),
            vector.len()
        )));
    }
    let mut proj = vec![Complex64::new(0.0, 0.0); n_blocks];
    for (z, &b) in vector.iter().zip(block_of) {
        if b >= n_blocks {
            return Err(QlError::invalid(format!("block index {b} out of range")));
        }
        proj[b] += z;
    }
    let nrm = linalg::norm(&proj);
    if nrm < 1e-300 {
        return Err(QlError::invalid("emergent vector has zero overlap with every block"));
    }
    for z in proj.iter_mut() {
        *z /= nrm;
    }
    fix_phase(&mut proj, 1e-12);
    Ok(proj)
}

/// Emergent state of a Hermitian operator for the given vertex partition.
///
/// Small operators are diagonalised densely; larger ones go through Lanczos
/// for the top two eigenpairs.
pub fn emergent_state_of(a: &SparseHermitian, block_of: &[usize], n_blocks: usize) -> Result<EmergentState> {
    let n = a.dim();
    if n == 0 {
        return Err(QlError::invalid("empty graph has no emergent state"));
    }
    let (top, second, vector) = if n <= DENSE_EMERGENT_LIMIT {
        let spec = eigendecompose(&a.to_dense())?;
        let second = spec.eigenvalues.get(1).copied().unwrap_or(f64::NEG_INFINITY);
        (spec.eigenvalues[0], second, spec.vector(0))
    } else {
        let res = lanczos_top(a, 2, LANCZOS_TOL, LANCZOS_SEED)?;
        if res.residuals[0] > 1e-8 {
            return Err(QlError::NoConvergence(format!(
                "top Ritz pair residual {:e}",
                res.residuals[0]
            )));
        }
        let mut v = res.vectors[0].clone();
        fix_phase(&mut v, 1e-12);
        (res.values[0], res.values[1], v)
    };
    let gap = top - second;
    if gap < DEGENERACY_THRESHOLD {
        return Err(QlError::DegenerateEmergent {
            gap,
            threshold: DEGENERACY_THRESHOLD,
        });
    }
    let projection = block_projection(&vector, block_of, n_blocks)?;
    Ok(EmergentState {
        eigenvalue: top,
        gap,
        projection,
        vector: Some(vector),
    })
}

/// Emergent state of a gain graph projected on `block_of`.
pub fn emergent_state(g: &GainGraph, block_of: &[usize]) -> Result<EmergentState> {
    if block_of.len() != g.n_vertices() {
        return Err(QlError::invalid("partition must cover every vertex"));
    }
    let n_blocks = block_of.iter().max().map_or(0, |&m| m + 1);
    emergent_state_of(&g.to_sparse(), block_of, n_blocks)
}

/// Emergent state of a QL bit on its two subgraphs.
pub fn ql_bit_emergent_state(bit: &QlBit) -> Result<EmergentState> {
    let block_of: Vec<usize> = bit.side_of().into_iter().map(usize::from).collect();
    emergent_state(&bit.graph, &block_of)
}

/// Effective two-level matrix `[[0, c], [conj c, 0]]` of a QL bit with bias `c`.
pub fn effective_two_level(c: Complex64) -> Result<DMatrix<Complex64>> {
    if (c.norm() - 1.0).abs() > crate::graph::UNIT_TOLERANCE {
        return Err(QlError::invalid(format!("bias {c} is not a complex unit")));
    }
    let z = Complex64::new(0.0, 0.0);
    Ok(DMatrix::from_row_slice(2, 2, &[z, c, c.conj(), z]))
}

/// Ideal QL bit projection `(1, conj c) / sqrt 2`.
pub fn ideal_projection(c: Complex64) -> [Complex64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(s, 0.0), c.conj() * s]
}

/// `lambda_1 - lambda_2` plus a connectivity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub gap: f64,
    pub connected: bool,
}

/// Spectral gap of the adjacency matrix. Disconnected graphs are flagged
/// rather than rejected; their gap is typically zero.
pub fn spectral_gap(g: &GainGraph) -> Result<GapReport> {
    let (components, _) = g.connected_components();
    let n = g.n_vertices();
    let (l1, l2) = if n <= DENSE_EMERGENT_LIMIT {
        let s = graph_spectrum(g)?;
        (s.eigenvalues[0], s.eigenvalues.get(1).copied().unwrap_or(s.eigenvalues[0]))
    } else {
        let res = lanczos_top(&g.to_sparse(), 2, LANCZOS_TOL, LANCZOS_SEED)?;
        (res.values[0], res.values[1])
    };
    Ok(GapReport {
        gap: l1 - l2,
        connected: components <= 1,
    })
}
