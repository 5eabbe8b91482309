//! Restriction of curves (and of their 1-jets) to lattice points, separation
//! diagnostics for pairs of curves and a pole-counting consistency check.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::{CurveFamily, ExpTerm, Lattice};
use crate::error::{Error, Result};
use crate::nevanlinna::{counting_function, PoleDivisor};
use crate::projgeom::{chordal_distance, ProjectivePoint};

/// One lattice sample: the canonical representative of `f(lambda)` and,
/// for jet samples, the canonical tangent (the derivative of the unit lift,
/// projected orthogonally to it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub i: i64,
    pub j: i64,
    pub lambda: Complex64,
    pub value: ProjectivePoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangent: Option<Vec<Complex64>>,
}

/// `f|_Lambda` (or `df|_Lambda`) on the lattice points of a disk, in the
/// order of [`Lattice::points_in_disk`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedCurve {
    pub lattice: Lattice,
    pub radius: f64,
    pub samples: Vec<Sample>,
}

impl DiscretizedCurve {
    pub fn has_jets(&self) -> bool {
        self.samples.first().is_some_and(|s| s.tangent.is_some())
    }
}

fn sample(curve: &CurveFamily, lat: &Lattice, radius: f64, jets: bool) -> Result<DiscretizedCurve> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("window radius {radius} must be >= 0")));
    }
    let samples = lat
        .points_in_disk(radius)
        .par_iter()
        .map(|p| {
            let jet = curve.local_jet(p.z)?;
            let (value, tangent) = jet.canonical_tangent();
            Ok(Sample {
                i: p.i,
                j: p.j,
                lambda: p.z,
                value: ProjectivePoint::new(value)?,
                tangent: jets.then_some(tangent),
            })
        })
        .collect::<Result<_>>()?;
    Ok(DiscretizedCurve {
        lattice: lat.clone(),
        radius,
        samples,
    })
}

/// Values of `curve` at the lattice points of the closed disk of radius
/// `radius`.
pub fn restrict(curve: &CurveFamily, lat: &Lattice, radius: f64) -> Result<DiscretizedCurve> {
    sample(curve, lat, radius, false)
}

/// Values and canonical tangents of `curve` at the lattice points of the
/// disk.
pub fn jet_restrict(curve: &CurveFamily, lat: &Lattice, radius: f64) -> Result<DiscretizedCurve> {
    sample(curve, lat, radius, true)
}

/// Chordal distance plus the Euclidean gap between canonical tangents.
pub fn jet_distance(a: &Sample, b: &Sample) -> Result<f64> {
    let d = chordal_distance(&a.value, &b.value)?;
    let gap = match (&a.tangent, &b.tangent) {
        (Some(x), Some(y)) => {
            if x.len() != y.len() {
                return Err(Error::DimensionMismatch {
                    expected: x.len(),
                    got: y.len(),
                });
            }
            x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt()
        }
        _ => return Err(Error::InvalidInput("jet distance needs jet samples".into())),
    };
    Ok(d + gap)
}

/// Largest sample distance between the discretizations of two curves on
/// the same window: chordal distance of values, or [`jet_distance`] when
/// `use_jets`.
pub fn separation(
    c1: &CurveFamily,
    c2: &CurveFamily,
    lat: &Lattice,
    radius: f64,
    use_jets: bool,
) -> Result<f64> {
    let a = sample(c1, lat, radius, use_jets)?;
    let b = sample(c2, lat, radius, use_jets)?;
    let mut worst = 0.0f64;
    for (x, y) in a.samples.iter().zip(&b.samples) {
        let d = if use_jets {
            jet_distance(x, y)?
        } else {
            chordal_distance(&x.value, &y.value)?
        };
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Integrated lattice pole count against its leading term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleCountCheck {
    pub n_of_r: f64,
    pub leading_term: f64,
    pub relative_gap: f64,
}

/// `N(r)` for poles of multiplicity `multiplicity` at every lattice point,
/// against `multiplicity * pi r^2 / (2 covolume)`.
pub fn pole_counting_check(lat: &Lattice, multiplicity: u32, r: f64) -> Result<PoleCountCheck> {
    if multiplicity == 0 {
        return Err(Error::InvalidInput("multiplicity must be positive".into()));
    }
    let longest = lat.omega1().norm().max(lat.omega2().norm());
    if !(r >= 2.0 * longest) || !(r >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "radius {r} must be at least twice the longest generator ({longest})"
        )));
    }
    let divisor = PoleDivisor::lattice(lat, multiplicity, r)?;
    let n_of_r = counting_function(&divisor, r)?;
    let leading_term = multiplicity as f64 * std::f64::consts::PI * r * r / (2.0 * lat.covolume());
    Ok(PoleCountCheck {
        n_of_r,
        leading_term,
        relative_gap: (n_of_r - leading_term).abs() / leading_term,
    })
}

/// A random exponential curve `[c_0 e^{r_0 z} : ... : c_N e^{r_N z}]` with
/// `|c_i|` uniform in `[1/2, 2]`, rates uniform in the unit disk and uniform
/// phases. Such curves grow linearly in `T(r)`, so their mean energy is 0.
pub fn random_exponential(seed: u64, dim: usize) -> Result<CurveFamily> {
    if dim == 0 {
        return Err(Error::InvalidInput("target dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let terms = (0..=dim)
        .map(|_| {
            let coeff = Complex64::from_polar(0.5 + 1.5 * rng.gen::<f64>(), tau * rng.gen::<f64>());
            let rate = Complex64::from_polar(rng.gen::<f64>().sqrt(), tau * rng.gen::<f64>());
            ExpTerm { coeff, rate }
        })
        .collect();
    CurveFamily::exponential(terms)
}

/// Outcome of the seeded separation trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationTrials {
    pub seed: u64,
    pub dim: usize,
    pub radius: f64,
    pub threshold: f64,
    pub separations: Vec<f64>,
    pub separated: usize,
}

/// Draws `trials` pairs of distinct [`random_exponential`] curves and
/// records their value separation on the lattice window; a pair counts as
/// separated when the separation exceeds `threshold`.
pub fn exponential_separation_trials(
    lat: &Lattice,
    radius: f64,
    dim: usize,
    trials: usize,
    seed: u64,
    threshold: f64,
) -> Result<SeparationTrials> {
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(u64, u64)> = (0..trials).map(|_| (seeds.gen(), seeds.gen())).collect();
    let separations = pairs
        .into_par_iter()
        .map(|(a, b)| {
            let f = random_exponential(a, dim)?;
            let g = random_exponential(b, dim)?;
            separation(&f, &g, lat, radius, false)
        })
        .collect::<Result<Vec<f64>>>()?;
    let separated = separations.iter().filter(|&&d| d > threshold).count();
    Ok(SeparationTrials {
        seed,
        dim,
        radius,
        threshold,
        separations,
        separated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn line_jets() {
        let lat = Lattice::square();
        let d = jet_restrict(&CurveFamily::monomial(1), &lat, 2.0).unwrap();
        assert_eq!(d.samples.len(), 13);
        for s in &d.samples {
            let expect = ProjectivePoint::new(vec![c(1.0, 0.0), s.lambda]).unwrap();
            assert!(chordal_distance(&s.value, &expect).unwrap() < 1e-15);
        }
        assert!(d.has_jets());
    }

    #[test]
    fn weierstrass_discretization_is_constant() {
        // every lattice point is a pole: f(lambda) = [0 : 1]
        let lat = Lattice::square();
        let curve = CurveFamily::weierstrass(lat.clone()).unwrap();
        let d = restrict(&curve, &lat, 3.0).unwrap();
        let pole = ProjectivePoint::from_reals(&[0.0, 1.0]).unwrap();
        assert!(d
            .samples
            .iter()
            .all(|s| chordal_distance(&s.value, &pole).unwrap() == 0.0));
    }

    #[test]
    fn exponential_pair_separates() {
        let lat = Lattice::square();
        let a = CurveFamily::exp_line(c(1.0, 0.0));
        let b = CurveFamily::exp_line(c(-1.0, 0.0));
        assert_eq!(separation(&a, &a, &lat, 2.0, false).unwrap(), 0.0);
        assert!(separation(&a, &b, &lat, 2.0, false).unwrap() > 0.1);
    }

    #[test]
    fn pole_count_examples() {
        let lat = Lattice::square();
        let one = pole_counting_check(&lat, 1, 20.0).unwrap();
        let two = pole_counting_check(&lat, 2, 20.0).unwrap();
        assert!(one.relative_gap < 0.05);
        assert!((two.n_of_r - 2.0 * one.n_of_r).abs() < 1e-9);
        assert!(pole_counting_check(&lat, 1, 1.5).is_err());
    }

    #[test]
    fn random_exponential_pairs_separate() {
        let t = exponential_separation_trials(&Lattice::square(), 5.0, 1, 10, 7, 1e-9).unwrap();
        assert_eq!(t.separated, 10);
        let again = exponential_separation_trials(&Lattice::square(), 5.0, 1, 10, 7, 1e-9).unwrap();
        assert_eq!(t, again);
    }
}
