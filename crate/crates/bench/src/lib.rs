//! Fixtures shared by the kernel benchmarks.

use meandim::{CoefficientPattern, Complex64, CurveFamily, Lattice};

/// Sample points in the unit square, away from the lattice points of `Z^2`.
pub fn sample_points(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let t = (k as f64 + 0.5) / count as f64;
            Complex64::new(0.25 + 0.5 * t, 0.3 + 0.4 * (7.0 * t).fract())
        })
        .collect()
}

pub fn square_weierstrass() -> CurveFamily {
    CurveFamily::weierstrass(Lattice::square()).expect("square lattice")
}

pub fn square_lattice_family(dim: usize, seed: u64) -> CurveFamily {
    CurveFamily::lattice_family(Lattice::square(), 1.0, dim, CoefficientPattern::random(seed))
        .expect("valid family")
}
