//! Jones vectors, unit quaternions and SU(2) matrices.
//!
//! A normalised Jones vector `(a + bi, c + di)` is read as the quaternion
//! `a + bi + cj + dk`, and quaternions act as 2x2 matrices through
//! `1 -> s0, i -> -s1, j -> -s2, k -> -s3` (Pauli matrices times `i`), which
//! gives `((a + di, -b - ci), (b - ci, a - di))`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QlError, Result};

/// Accepted deviation of a norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Inputs within this distance of unit norm are renormalised, beyond it rejected.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

fn check_norm(norm_sq: f64) -> Result<f64> {
    let dev = (norm_sq.sqrt() - 1.0).abs();
    if !norm_sq.is_finite() || dev > RENORMALIZE_TOLERANCE {
        return Err(QlError::NotNormalized { norm_sq });
    }
    Ok(if dev > NORM_TOLERANCE { norm_sq.sqrt() } else { 1.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JonesVector {
    pub x: Complex64,
    pub y: Complex64,
}

impl JonesVector {
    /// Validates the norm, renormalising small drift.
    pub fn new(x: Complex64, y: Complex64) -> Result<Self> {
        let s = check_norm(x.norm_sqr() + y.norm_sqr())?;
        Ok(JonesVector { x: x / s, y: y / s })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let s = check_norm(a * a + b * b + c * c + d * d)?;
        Ok(Quaternion { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    /// Hamilton product.
    pub fn mul(&self, o: &Quaternion) -> Quaternion {
        Quaternion {
            a: self.a * o.a - self.b * o.b - self.c * o.c - self.d * o.d,
            b: self.a * o.b + self.b * o.a + self.c * o.d - self.d * o.c,
            c: self.a * o.c - self.b * o.d + self.c * o.a + self.d * o.b,
            d: self.a * o.d + self.b * o.c - self.c * o.b + self.d * o.a,
        }
    }
}

/// A 2x2 special unitary matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2Element {
    pub m: Matrix2<Complex64>,
}

impl SU2Element {
    /// Checks unitarity and unit determinant to [`NORM_TOLERANCE`].
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let e = SU2Element { m };
        let (u, d) = (e.unitarity_error(), e.det_error());
        if u > NORM_TOLERANCE || d > NORM_TOLERANCE {
            return Err(QlError::invalid(format!(
                "matrix is not in SU(2): unitarity error {u:e}, determinant error {d:e}"
            )));
        }
        Ok(e)
    }

    pub fn identity() -> Self {
        SU2Element { m: Matrix2::identity() }
    }

    /// Max entry of `|M^H M - I|`.
    pub fn unitarity_error(&self) -> f64 {
        (self.m.adjoint() * self.m - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn det_error(&self) -> f64 {
        (self.m.determinant() - Complex64::new(1.0, 0.0)).norm()
    }

    pub fn mul(&self, o: &SU2Element) -> SU2Element {
        SU2Element { m: self.m * o.m }
    }

    /// Back to the quaternion, inverting the matrix form.
    pub fn to_quaternion(&self) -> Quaternion {
        let (p, r) = (self.m[(0, 0)], self.m[(1, 0)]);
        Quaternion { a: p.re, b: r.re, c: -r.im, d: p.im }
    }

    /// Row-major `[[re, im], ...]` entries for JSON.
    pub fn entries(&self) -> [[f64; 2]; 4] {
        let m = &self.m;
        [
            [m[(0, 0)].re, m[(0, 0)].im],
            [m[(0, 1)].re, m[(0, 1)].im],
            [m[(1, 0)].re, m[(1, 0)].im],
            [m[(1, 1)].re, m[(1, 1)].im],
        ]
    }
}

/// `(a + bi, c + di) -> a + bi + cj + dk`.
pub fn jones_to_quaternion(j: &JonesVector) -> Result<Quaternion> {
    Quaternion::new(j.x.re, j.x.im, j.y.re, j.y.im)
}

pub fn quaternion_to_jones(q: &Quaternion) -> JonesVector {
    JonesVector {
        x: Complex64::new(q.a, q.b),
        y: Complex64::new(q.c, q.d),
    }
}

/// `((a + di, -b - ci), (b - ci, a - di))`.
pub fn quaternion_to_su2(q: &Quaternion) -> Result<SU2Element> {
    let q = Quaternion::new(q.a, q.b, q.c, q.d)?;
    let m = Matrix2::new(
        Complex64::new(q.a, q.d),
        Complex64::new(-q.b, -q.c),
        Complex64::new(q.b, -q.c),
        Complex64::new(q.a, -q.d),
    );
    Ok(SU2Element { m })
}

/// `(alpha, beta) -> ((alpha, -conj beta), (beta, conj alpha))`.
pub fn state_to_su2(alpha: Complex64, beta: Complex64) -> Result<SU2Element> {
    let s = check_norm(alpha.norm_sqr() + beta.norm_sqr())?;
    let (alpha, beta) = (alpha / s, beta / s);
    Ok(SU2Element {
        m: Matrix2::new(alpha, -beta.conj(), beta, alpha.conj()),
    })
}
