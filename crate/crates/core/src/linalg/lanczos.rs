use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dot, norm, SparseHermitian};
use crate::error::{QlError, Result};

/// Top of a Hermitian spectrum found by Lanczos iteration.
#[derive(Debug, Clone)]
pub struct LanczosResult {
    /// Descending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
    /// `||A x - lambda x||_inf` per pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

const CHECK_EVERY: usize = 10;

/// Lanczos with full reorthogonalisation for the `k` largest eigenpairs.
///
/// The Krylov basis grows until every wanted Ritz pair has residual estimate
/// below `tol * max(1, |theta|)` or the basis spans the whole space. On
/// breakdown the iteration restarts from a fresh random vector orthogonal to
/// the basis, which lets repeated eigenvalues show up with multiplicity.
/// The starting vector is drawn from a ChaCha stream seeded with `seed`.
pub fn lanczos_top(a: &SparseHermitian, k: usize, tol: f64, seed: u64) -> Result<LanczosResult> {
    let n = a.dim();
    let k = k.min(n);
    if k == 0 {
        return Ok(LanczosResult {
            values: vec![],
            vectors: vec![],
            residuals: vec![],
            iterations: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = a.max_row_sum().max(1.0);

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let mut q = random_unit_orthogonal(&mut rng, n, &basis)
        .ok_or_else(|| QlError::NoConvergence("could not seed Lanczos".into()))?;
    let mut w = vec![Complex64::new(0.0, 0.0); n];

    loop {
        a.mul_vec(&q, &mut w);
        let j = basis.len();
        let aj = dot(&q, &w).re;
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi -= qi * aj;
        }
        if j > 0 {
            let b = beta[j - 1];
            let prev = &basis[j - 1];
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= pi * b;
            }
        }
        basis.push(q.clone());
        alpha.push(aj);
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for v in &basis {
                let h = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= vi * h;
                }
            }
        }
        let bj = norm(&w);
        let m = basis.len();

        let full = m == n;
        let breakdown = bj <= 1e-10 * scale;
        if full || (m >= k && (m % CHECK_EVERY == 0 || breakdown)) {
            let (theta, y) = tridiagonal_eigen(&alpha, &beta);
            let converged = theta.iter().take(k).enumerate().all(|(i, &t)| {
                let est = if breakdown { 0.0 } else { bj * y[(m - 1, i)].abs() };
                est <= tol * t.abs().max(1.0)
            });
            // after a breakdown the current block is exact, but a restart may
            // still reveal larger eigenvalues elsewhere unless we span everything
            if full || (converged && !breakdown) {
                return Ok(finish(a, &basis, &theta, &y, k, m));
            }
        }

        if breakdown {
            match random_unit_orthogonal(&mut rng, n, &basis) {
                Some(fresh) => {
                    beta.push(0.0);
                    q = fresh;
                }
                None => {
                    let (theta, y) = tridiagonal_eigen(&alpha, &beta);
                    return Ok(finish(a, &basis, &theta, &y, k, m));
                }
            }
        } else {
            beta.push(bj);
            q = w.iter().map(|z| z / bj).collect();
        }
    }
}

fn finish(
    a: &SparseHermitian,
    basis: &[Vec<Complex64>],
    theta: &[f64],
    y: &DMatrix<f64>,
    k: usize,
    m: usize,
) -> LanczosResult {
    let n = a.dim();
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut ax = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..k.min(theta.len()) {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (row, qv) in basis.iter().enumerate().take(m) {
            let c = y[(row, i)];
            for (xi, qi) in x.iter_mut().zip(qv) {
                *xi += qi * c;
            }
        }
        let nx = norm(&x);
        for xi in x.iter_mut() {
            *xi /= nx;
        }
        a.mul_vec(&x, &mut ax);
        let res = ax
            .iter()
            .zip(&x)
            .map(|(p, xi)| (p - xi * theta[i]).norm())
            .fold(0.0, f64::max);
        values.push(theta[i]);
        vectors.push(x);
        residuals.push(res);
    }
    LanczosResult {
        values,
        vectors,
        residuals,
        iterations: m,
    }
}

/// Eigenpairs of the symmetric tridiagonal matrix, sorted descending.
fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let theta = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    (theta, y)
}

fn random_unit_orthogonal(
    rng: &mut ChaCha8Rng,
    n: usize,
    basis: &[Vec<Complex64>],
) -> Option<Vec<Complex64>> {
    for _ in 0..8 {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for _ in 0..2 {
            for b in basis {
                let h = dot(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= bi * h;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            for vi in v.iter_mut() {
                *vi /= nv;
            }
            return Some(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::jacobi_eigh;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn matches_jacobi_on_complex_ring() {
        // ring with a twisted gain on one edge
        let n = 40;
        let mut edges: Vec<(usize, usize, Complex64)> =
            (0..n - 1).map(|i| (i, i + 1, one())).collect();
        edges.push((0, n - 1, Complex64::from_polar(1.0, 0.7)));
        for i in 0..n - 7 {
            edges.push((i, i + 7, Complex64::from_polar(1.0, 0.1 * i as f64)));
        }
        let a = SparseHermitian::from_edges(n, edges);
        let res = lanczos_top(&a, 3, 1e-12, 5).unwrap();
        let (mut vals, _) = jacobi_eigh(&a.to_dense()).unwrap();
        vals.sort_by(|x, y| y.total_cmp(x));
        for i in 0..3 {
            assert!((res.values[i] - vals[i]).abs() < 1e-9, "{} vs {}", res.values[i], vals[i]);
            assert!(res.residuals[i] < 1e-8);
        }
    }

    #[test]
    fn finds_repeated_top_eigenvalue_of_disjoint_copies() {
        // two disjoint K4: eigenvalue 3 twice
        let mut edges = Vec::new();
        for base in [0, 4] {
            for u in 0..4 {
                for v in u + 1..4 {
                    edges.push((base + u, base + v, one()));
                }
            }
        }
        let a = SparseHermitian::from_edges(8, edges);
        let res = lanczos_top(&a, 3, 1e-12, 1).unwrap();
        assert!((res.values[0] - 3.0).abs() < 1e-9);
        assert!((res.values[1] - 3.0).abs() < 1e-9);
        assert!((res.values[2] + 1.0).abs() < 1e-9);
    }
}
