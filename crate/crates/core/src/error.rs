use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the geometry, quadrature and cover-search routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid projective point: all homogeneous coordinates vanish")]
    InvalidPoint,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate lattice: generators are linearly dependent over the reals")]
    DegenerateLattice,

    #[error("lattice sum with exponent {0} diverges (need s > 2)")]
    DivergentSum(f64),

    #[error("point {z} is within {distance:.3e} of the lattice pole {pole}; use the local chart")]
    PoleProximity {
        z: Complex64,
        pole: Complex64,
        distance: f64,
    },

    #[error("chart error at {0}: affine lift has a pole on the stencil")]
    Chart(Complex64),

    #[error("nearest lattice point to {0} is ambiguous; perturb the evaluation point")]
    AmbiguousNearest(Complex64),

    #[error("coefficient {value} has modulus outside the annulus [{lo}, {hi}]")]
    CoefficientOutOfAnnulus { value: Complex64, lo: f64, hi: f64 },

    #[error("quadrature did not converge (last estimate {last_estimate}, change {last_change:.3e})")]
    QuadratureFailure {
        last_estimate: f64,
        last_change: f64,
    },

    #[error("cover leaves the refinement point {0:?} uncovered")]
    Uncovered(Vec<u32>),

    #[error("search exceeded the guard of {limit} nodes")]
    SearchGuardExceeded { limit: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
