#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qlgraph::GainGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Eigenvalues from nalgebra's Hermitian solver, descending.
pub fn oracle_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// Eigenpairs from nalgebra, descending.
pub fn oracle_eigh(a: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let e = a.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..a.nrows()).collect();
    idx.sort_by(|&x, &y| e.eigenvalues[y].total_cmp(&e.eigenvalues[x]));
    let vals = idx.iter().map(|&k| e.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(a.nrows(), a.ncols(), |r, k| e.eigenvectors[(r, idx[k])]);
    (vals, vecs)
}

/// Clusters of equal eigenvalues (descending input) as index ranges.
pub fn clusters(vals: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=vals.len() {
        if k == vals.len() || (vals[k - 1] - vals[k]).abs() > tol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// `V_S V_S^H` for the columns in `cols`.
pub fn projector(vecs: &DMatrix<Complex64>, cols: std::ops::Range<usize>) -> DMatrix<Complex64> {
    let v = vecs.columns(cols.start, cols.len()).into_owned();
    &v * v.adjoint()
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Random gain graph: each pair joined with probability `p`, gain a random
/// unit or 1 when `real`.
pub fn random_gain_graph(n: usize, p: f64, real: bool, seed: u64) -> GainGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = GainGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                let z = if real { c(1.0, 0.0) } else { Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0)) };
                g.add_edge(u, v, z).unwrap();
            }
        }
    }
    g
}
