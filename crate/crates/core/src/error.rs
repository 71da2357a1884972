use thiserror::Error;

/// Errors produced by the library.
///
/// Zero crossings of a Wronskian are reported with a bracketing interval so
/// parameter scans can record singular regions instead of aborting.
#[derive(Debug, Clone, Error)]
pub enum SusyError {
    #[error("empty interval: x_min = x_max = {0}")]
    EmptyInterval(f64),
    #[error("reversed bounds: x_min = {x_min} > x_max = {x_max}")]
    ReversedBounds { x_min: f64, x_max: f64 },
    #[error("too few points: need at least {min}, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("sample length {len} does not match grid size {n}")]
    LengthMismatch { len: usize, n: usize },
    #[error("non-finite value at grid index {index}")]
    NonFinite { index: usize },
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("modulus m = {0} outside (0, 1)")]
    ModulusOutOfRange(f64),
    #[error("argument within {dist:.3e} of a lattice point (pole)")]
    PoleProximity { dist: f64 },
    #[error("factorization energy {0} lies in or too close to the spectrum")]
    EpsilonInSpectrum(f64),
    #[error("factorization energy must be real and negative for the free particle, got {0}")]
    EpsilonNotNegative(f64),
    #[error("root search for delta did not converge after {iters} iterations (residual {residual:.3e})")]
    NewtonNoConvergence { iters: usize, residual: f64 },
    #[error("Wronskian crosses zero inside [{x_lo}, {x_hi}]")]
    WronskianZero { x_lo: f64, x_hi: f64 },
    #[error("seed Wronskian W(u,v) deviates from 1 by {0:.3e}")]
    WronskianNotUnit(f64),
    #[error("Schrodinger residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("chain order {k} not supported for this family (max {max})")]
    UnsupportedOrder { k: usize, max: usize },
    #[error("chain parameter slices must have length k-1 = {expected}, got C: {c_len}, D: {d_len}")]
    ParameterLength { expected: usize, c_len: usize, d_len: usize },
    #[error("derivative order mismatch: seed provides {have}, chain needs {need}")]
    DerivativeOrderMismatch { have: usize, need: usize },
    #[error("integration overflowed even after rescaling")]
    Overflow,
    #[error("missing potential samples for the numeric family")]
    MissingPotential,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SusyError>;
