use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QlError, Result};

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for a complex Hermitian matrix.
///
/// Each pivot `(p, q)` is first made real by a diagonal phase rotation of
/// column `q`, then annihilated by an ordinary real plane rotation. Sweeps
/// continue until the off-diagonal Frobenius norm falls below
/// `1e-14 * ||A||_F`.
///
/// Returns unsorted eigenvalues and the matching eigenvectors as columns.
/// The input is assumed Hermitian; only the upper triangle drives the
/// rotations but both triangles are updated.
pub fn jacobi_eigh(a: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(QlError::invalid("matrix is not square"));
    }
    // row-major working copy
    let mut m: Vec<Complex64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            m.push(a[(i, j)]);
        }
    }
    // eigenvectors, row-major
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
        m[i * n + i].im = 0.0;
    }

    let fro: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = 1e-14 * fro.max(f64::MIN_POSITIVE);
    let skip = 1e-17 * fro.max(f64::MIN_POSITIVE);

    let mut converged = n <= 1;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_norm(&m, n);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let b = apq.norm();
                if b <= skip {
                    continue;
                }
                rotate(&mut m, &mut v, n, p, q, apq, b);
            }
        }
    }
    if !converged && off_norm(&m, n) > target {
        return Err(QlError::NoConvergence(format!(
            "Jacobi off-diagonal norm {:e} after {} sweeps",
            off_norm(&m, n),
            JACOBI_MAX_SWEEPS
        )));
    }

    let values = (0..n).map(|i| m[i * n + i].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[r * n + c]);
    Ok((values, vectors))
}

fn off_norm(m: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += m[i * n + j].norm_sqr();
        }
    }
    (2.0 * s).sqrt()
}

#[inline]
fn rotate(
    m: &mut [Complex64],
    v: &mut [Complex64],
    n: usize,
    p: usize,
    q: usize,
    apq: Complex64,
    b: f64,
) {
    // apq = b e^{i phi}; column q of the basis picks up e^{-i phi}
    let phase = apq / b;
    let unphase = phase.conj();
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let u = m[r * n + p];
        let w = m[r * n + q] * unphase;
        let new_rp = u * c - w * s;
        let new_rq = w * c + u * s;
        m[r * n + p] = new_rp;
        m[r * n + q] = new_rq;
        m[p * n + r] = new_rp.conj();
        m[q * n + r] = new_rq.conj();
    }
    m[p * n + p] = Complex64::new(app - t * b, 0.0);
    m[q * n + q] = Complex64::new(aqq + t * b, 0.0);
    m[p * n + q] = Complex64::new(0.0, 0.0);
    m[q * n + p] = Complex64::new(0.0, 0.0);

    for r in 0..n {
        let vp = v[r * n + p];
        let vq = v[r * n + q] * unphase;
        v[r * n + p] = vp * c - vq * s;
        v[r * n + q] = vp * s + vq * c;
    }
}
