use thiserror::Error;

/// Errors raised by the lattice, thermodynamics and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FpuError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undefined localization: total site energy is zero")]
    UndefinedLocalization,

    #[error("could not draw a non-degenerate initial state after {0} attempts")]
    DegenerateDraw(usize),

    #[error("numerical blow-up at step {step}")]
    NumericalBlowUp { step: u64 },

    #[error("quadrature did not converge: achieved relative error {achieved:e}")]
    QuadratureNonConvergence { achieved: f64 },

    #[error("root bracket failure: {0}")]
    BracketFailure(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("sampling too coarse: Nyquist {nyquist:.4} must exceed {required:.4}")]
    NyquistViolation { nyquist: f64, required: f64 },

    #[error("empty integration band for mode {k}")]
    EmptyBand { k: usize },

    #[error("correlation has not decayed below {target:e} within the horizon (reached {reached:e}); use a longer horizon")]
    InsufficientDecay { target: f64, reached: f64 },

    #[error("no e-folding crossing within the horizon (minimum |C/C0| = {min:.4})")]
    NoCrossing { min: f64 },

    #[error("zero function has no width")]
    ZeroFunction,
}

pub type Result<T> = std::result::Result<T, FpuError>;
