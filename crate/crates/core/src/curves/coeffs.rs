use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identity of the generator behind [`CoefficientPattern::Random`], recorded
/// in experiment metadata.
pub const GENERATOR_ID: &str =
    "rand_chacha::ChaCha8Rng::seed_from_u64; modulus U[A,2A), phase U[0,2pi); cell-major order";

/// Default period (in lattice steps along each generator) of random patterns.
pub const DEFAULT_RANDOM_PERIOD: usize = 3;

/// How the coefficients `a_{n lambda}` of a lattice family are produced.
///
/// All modes are periodic under a sublattice `period * Lambda`; the
/// coefficients are stored for one block of `period x period` lattice points
/// (`lambda = i omega1 + j omega2`, `0 <= i, j < period`), cell-major with
/// the cell index `i * period + j` and the coordinate index `n` fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CoefficientPattern {
    /// Independent draws on one block, extended periodically.
    Random { seed: u64, period: usize },
    /// The same vector `(a_1, ..., a_N)` at every lattice point.
    Constant { values: Vec<Complex64> },
    /// An explicit block of `N * period^2` values.
    Periodic { period: usize, block: Vec<Complex64> },
}

impl CoefficientPattern {
    pub fn random(seed: u64) -> Self {
        CoefficientPattern::Random {
            seed,
            period: DEFAULT_RANDOM_PERIOD,
        }
    }

    pub fn period(&self) -> usize {
        match self {
            CoefficientPattern::Random { period, .. } => *period,
            CoefficientPattern::Constant { .. } => 1,
            CoefficientPattern::Periodic { period, .. } => *period,
        }
    }

    /// Produces the block of coefficients for amplitude `amplitude` and
    /// target `CP^dim`, checking the annulus `A <= |a| <= 2A`.
    pub fn materialize(&self, amplitude: f64, dim: usize) -> Result<Vec<Complex64>> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidInput(format!("amplitude {amplitude} must be positive")));
        }
        if dim == 0 {
            return Err(Error::InvalidInput("target dimension must be at least 1".into()));
        }
        let period = self.period();
        if period == 0 {
            return Err(Error::InvalidInput("pattern period must be at least 1".into()));
        }
        let values = match self {
            CoefficientPattern::Random { seed, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..dim * period * period)
                    .map(|_| {
                        let modulus = amplitude * (1.0 + rng.gen::<f64>());
                        let phase = TAU * rng.gen::<f64>();
                        Complex64::from_polar(modulus, phase)
                    })
                    .collect()
            }
            CoefficientPattern::Constant { values } => {
                if values.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: values.len(),
                    });
                }
                values.clone()
            }
            CoefficientPattern::Periodic { block, .. } => {
                if block.len() != dim * period * period {
                    return Err(Error::DimensionMismatch {
                        expected: dim * period * period,
                        got: block.len(),
                    });
                }
                block.clone()
            }
        };
        let (lo, hi) = (amplitude, 2.0 * amplitude);
        let slack = 1e-12 * amplitude;
        for &v in &values {
            let r = v.norm();
            if r < lo - slack || r > hi + slack {
                return Err(Error::CoefficientOutOfAnnulus { value: v, lo, hi });
            }
        }
        Ok(values)
    }
}
