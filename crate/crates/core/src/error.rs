use thiserror::Error;

/// Errors raised by graph construction, spectral analysis and the experiments.
#[derive(Debug, Error)]
pub enum QlError {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("n*d must be even for a d-regular graph (n = {n}, d = {d})")]
    Parity { n: usize, d: usize },

    #[error("no simple {d}-regular pairing found on {n} vertices after {attempts} restarts")]
    RejectionsExhausted { n: usize, d: usize, attempts: usize },

    #[error("gain {re}+{im}i on edge ({u}, {v}) is not a complex unit")]
    NonUnitGain { u: usize, v: usize, re: f64, im: f64 },

    #[error("matrix is not Hermitian (max |A - A^H| = {max_asymmetry:e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("dimension {dim} exceeds the dense eigensolver cap of {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("product would have {vertices} vertices, above the cap of {cap}")]
    ProductTooLarge { vertices: usize, cap: usize },

    #[error("emergent state is degenerate: gap {gap:e} below {threshold:e}")]
    DegenerateEmergent { gap: f64, threshold: f64 },

    #[error("vector is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("simulation diverged at t = {t}: {reason}")]
    Diverged { t: f64, reason: String },

    #[error("basis ordering mismatch: expected {expected}, got {got}")]
    BasisMismatch { expected: String, got: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl QlError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        QlError::Invalid(msg.into())
    }

    /// True for failures of the numerics (degeneracy, divergence, convergence)
    /// rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QlError::DegenerateEmergent { .. }
                | QlError::NoConvergence(_)
                | QlError::Diverged { .. }
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, QlError::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, QlError>;
