//! Numerical kernels: dense Hermitian Jacobi, sparse Hermitian storage and a
//! Lanczos solver for the top of the spectrum of large sparse graphs.

mod jacobi;
mod lanczos;
mod sparse;

pub use jacobi::{jacobi_eigh, JACOBI_MAX_SWEEPS};
pub use lanczos::{lanczos_top, LanczosResult};
pub use sparse::SparseHermitian;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Largest `|A_ij - conj(A_ji)|`.
pub fn max_asymmetry(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Rotates `v` so its first component with modulus above `tol` is real positive.
pub fn fix_phase(v: &mut [Complex64], tol: f64) {
    if let Some(first) = v.iter().find(|z| z.norm() > tol).copied() {
        let rot = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b>` conjugate-linear in the first argument.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Kronecker product of two vectors, left factor slowest varying.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}
