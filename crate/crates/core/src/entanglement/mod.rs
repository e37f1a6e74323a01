//! Two-bit states, concurrence and the experiments built on them.

mod cnot;
mod experiment;
mod nocloning;

pub use cnot::{cnot_permute_blocks, cnot_transform, moved_edges, u_cnot, BlockBasis, BlockMatrix};
pub use experiment::{
    nonseparable_experiment, run_paper_ensemble, sample_cross_edges, EnsembleSummary, ExperimentConfig,
    ExperimentOutcome, ExperimentReport, PaperExperiment,
};
pub use nocloning::{
    grid_search, no_cloning_check, CloneTarget, CloneVerdict, ConstraintKind, PhaseConstraint,
    PhaseConstraintSystem,
};

pub use crate::graph::connected_components;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QlError, Result};
use crate::linalg::fix_phase;

/// Pure state over the natural block basis `(a1b1, a1b2, a2b1, a2b2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoBitState {
    pub amplitudes: [Complex64; 4],
}

impl TwoBitState {
    /// Accepts states within 1e-6 of unit norm (renormalising them) and
    /// fixes the global phase.
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq.sqrt() - 1.0).abs() > 1e-6 {
            return Err(QlError::NotNormalized { norm_sq });
        }
        let mut a = amplitudes.map(|z| z / norm_sq.sqrt());
        fix_phase(&mut a, 1e-12);
        Ok(TwoBitState { amplitudes: a })
    }

    pub fn from_slice(v: &[Complex64]) -> Result<Self> {
        let a: [Complex64; 4] = v
            .try_into()
            .map_err(|_| QlError::invalid(format!("a two-bit state has 4 amplitudes, got {}", v.len())))?;
        TwoBitState::new(a)
    }

    /// Tensor product `(x1, x2) (x) (y1, y2)`.
    pub fn product(x: [Complex64; 2], y: [Complex64; 2]) -> Result<Self> {
        TwoBitState::new([x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]])
    }

    /// Mean modulus over `(a1b1, a2b2)` and over `(a1b2, a2b1)`.
    pub fn paired_magnitudes(&self) -> (f64, f64) {
        let a = &self.amplitudes;
        ((a[0].norm() + a[3].norm()) / 2.0, (a[1].norm() + a[2].norm()) / 2.0)
    }
}

/// `2 |a11 a22 - a12 a21|`.
pub fn concurrence(s: &TwoBitState) -> f64 {
    let a = &s.amplitudes;
    (2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0)
}
