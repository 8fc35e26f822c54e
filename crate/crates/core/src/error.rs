use thiserror::Error;

use crate::map::BcnfParams;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which requirement on the leading eigenvalues of `M_X` was not met.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("matrix has fewer than two eigenvalues")]
    TooSmall,
    #[error("leading eigenvalue {index} is not real (imaginary part {imag:e})")]
    ComplexLeading { index: usize, imag: f64 },
    #[error("eigenvalue condition `{condition}` violated ({detail})")]
    Ordering {
        condition: &'static str,
        detail: String,
    },
    #[error("eigenvalue {value} is not simple (gap {gap:e})")]
    NotSimple { value: f64, gap: f64 },
    #[error("unstable eigenvector is tangent to the switching manifold (e1^T zeta1 = {value:e})")]
    Transversality { value: f64 },
    #[error("eigenvector normalisation failed for eigenvalue {value}")]
    Normalisation { value: f64 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("words must be non-empty")]
    EmptyWord,
    #[error("invalid symbol {0:?}; expected L or R")]
    InvalidSymbol(char),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("X and Y start with the same symbol")]
    SameLeadingSymbol,
    #[error("XY = (YX)^(0,alpha) has no solution for these words")]
    NoFlipIdentity,
    #[error("invalid rotational word parameters (l={l}, m={m}, n={n})")]
    RotationParams { l: usize, m: usize, n: usize },
    #[error("invalid window [{lo}, {hi}]: must contain index 0")]
    InvalidWindow { lo: i64, hi: i64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("continuity violated: column {column} of A_R - A_L has magnitude {magnitude:e}")]
    Continuity { column: usize, magnitude: f64 },
    #[error("1 is an eigenvalue of M_{word}: |det(I - M)| = {det:e}")]
    DegenerateCycle { word: String, det: f64 },
    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    EigenNonConvergence { iterations: usize },
    #[error("spectral frame: {0}")]
    Frame(#[from] FrameError),
    #[error("forward orbit leaves the X-cycle at step {step} (distance {distance:e})")]
    NotHomoclinic { step: i64, distance: f64 },
    #[error("orbit window too short: need {needed} points, have {have}")]
    WindowTooShort { needed: usize, have: usize },
    #[error("Jacobian is singular (condition number {condition:e})")]
    SingularJacobian { condition: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("damped step failed to reduce the residual after {halvings} halvings (residual {residual:e})")]
    Stalled { halvings: usize, residual: f64 },
    #[error("frame lost while stepping: {source}")]
    FrameLost {
        source: Box<Error>,
        last_good: BcnfParams,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
