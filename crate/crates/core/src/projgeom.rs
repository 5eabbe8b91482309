//! Complex projective space with the Fubini–Study metric.
//!
//! The metric is normalised so that a projective line has area one. For a
//! holomorphic curve with homogeneous lift `v(z)` the pull-back of the
//! Fubini–Study form is `|df|^2 dx dy` with
//!
//! ```text
//! pi |df|^2 = (|v|^2 |v'|^2 - |<v, v'>|^2) / |v|^4
//!           = sum_{i<j} |v_i v'_j - v_j v'_i|^2 / |v|^4
//! ```
//!
//! which does not depend on the lift. The second (Lagrange) form is the one
//! evaluated here: every term is non-negative, so there is no cancellation
//! when the derivative is nearly parallel to the value.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curves::CurveFamily;
use crate::error::{Error, Result};

/// A point of `CP^N` in homogeneous coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct ProjectivePoint {
    coords: Vec<Complex64>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() || coords.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(Error::InvalidPoint);
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidPoint);
        }
        Ok(Self { coords })
    }

    pub fn from_reals(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// Complex dimension `N` of the ambient `CP^N`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Canonical representative: unit Euclidean norm, first nonzero
    /// coordinate real and positive.
    pub fn normalize(&self) -> ProjectivePoint {
        ProjectivePoint {
            coords: canonical_lift(&self.coords).0,
        }
    }

    /// Fubini–Study chordal distance, `sin` of the angle between the lines.
    pub fn chordal_distance(&self, other: &ProjectivePoint) -> Result<f64> {
        chordal_distance(self, other)
    }
}

impl TryFrom<Vec<Complex64>> for ProjectivePoint {
    type Error = Error;
    fn try_from(value: Vec<Complex64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<ProjectivePoint> for Vec<Complex64> {
    fn from(p: ProjectivePoint) -> Self {
        p.coords
    }
}

/// Returns the canonical lift of `v` together with the scalar `c` such that
/// the lift equals `c * v`.
pub(crate) fn canonical_lift(v: &[Complex64]) -> (Vec<Complex64>, Complex64) {
    let norm = norm(v);
    let lead = v
        .iter()
        .copied()
        .find(|c| c.norm_sqr() > 0.0)
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    let c = phase / norm;
    (v.iter().map(|x| x * c).collect(), c)
}

fn norm(v: &[Complex64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, c| m.max(c.re.abs()).max(c.im.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = v.iter().map(|c| (c / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

/// `sum_{i<j} |a_i b_j - a_j b_i|^2`, i.e. `|a|^2 |b|^2 - |<a, b>|^2`.
pub(crate) fn wedge_norm_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            acc += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    acc
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0f64, |m, c| m.max(c.norm()))
}

/// Canonical representative of `p` (see [`ProjectivePoint::normalize`]).
pub fn normalize(p: &ProjectivePoint) -> ProjectivePoint {
    p.normalize()
}

pub fn chordal_distance(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<f64> {
    if p.coords.len() != q.coords.len() {
        return Err(Error::DimensionMismatch {
            expected: p.coords.len(),
            got: q.coords.len(),
        });
    }
    let sp = max_abs(&p.coords);
    let sq = max_abs(&q.coords);
    let a: Vec<Complex64> = p.coords.iter().map(|c| c / sp).collect();
    let b: Vec<Complex64> = q.coords.iter().map(|c| c / sq).collect();
    let na: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|c| c.norm_sqr()).sum();
    let d = (wedge_norm_sqr(&a, &b) / (na * nb)).sqrt();
    Ok(d.min(1.0))
}

/// First-order jet of a holomorphic curve at a point: a homogeneous lift
/// `v` and its complex derivative `v'`.
///
/// `chart_scale` records the multiplier relating this lift to the affine
/// lift `(1, f_1, ..., f_N)`, i.e. `v = chart_scale * (1, f)`. It is
/// informational; densities never depend on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveJet {
    value: Vec<Complex64>,
    derivative: Vec<Complex64>,
    pub chart_scale: Complex64,
}

impl ProjectiveJet {
    pub fn new(value: Vec<Complex64>, derivative: Vec<Complex64>) -> Result<Self> {
        Self::with_chart_scale(value, derivative, Complex64::new(1.0, 0.0))
    }

    pub fn with_chart_scale(
        value: Vec<Complex64>,
        derivative: Vec<Complex64>,
        chart_scale: Complex64,
    ) -> Result<Self> {
        if value.len() != derivative.len() {
            return Err(Error::DimensionMismatch {
                expected: value.len(),
                got: derivative.len(),
            });
        }
        if value.iter().all(|c| c.norm_sqr() == 0.0)
            || value.iter().any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidPoint);
        }
        Ok(Self {
            value,
            derivative,
            chart_scale,
        })
    }

    pub fn lift(&self) -> &[Complex64] {
        &self.value
    }

    pub fn derivative(&self) -> &[Complex64] {
        &self.derivative
    }

    pub fn point(&self) -> ProjectivePoint {
        ProjectivePoint {
            coords: self.value.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.value.len() - 1
    }

    /// Re-express the jet in the lift `(c v, c v' + c' v)`.
    pub fn relift(&self, c: Complex64, dc: Complex64) -> Result<Self> {
        let value = self.value.iter().map(|v| c * v).collect();
        let derivative = self
            .value
            .iter()
            .zip(&self.derivative)
            .map(|(v, d)| c * d + dc * v)
            .collect();
        Self::with_chart_scale(value, derivative, self.chart_scale * c)
    }

    /// Unit-norm lift with real positive leading coordinate; the derivative
    /// is multiplied by the same scalar and then projected onto the
    /// orthogonal complement of the value, which removes the dependence on
    /// how the original lift varied.
    pub fn canonical_tangent(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let (v, c) = canonical_lift(&self.value);
        let d: Vec<Complex64> = self.derivative.iter().map(|x| x * c).collect();
        let inner: Complex64 = v.iter().zip(&d).map(|(a, b)| a.conj() * b).sum();
        let t = d.iter().zip(&v).map(|(b, a)| b - inner * a).collect();
        (v, t)
    }

    pub fn energy_density(&self) -> f64 {
        energy_density(self)
    }
}

/// Pointwise energy density `|df|^2` of a curve at the jet.
pub fn energy_density(jet: &ProjectiveJet) -> f64 {
    let s = max_abs(&jet.value);
    let v: Vec<Complex64> = jet.value.iter().map(|c| c / s).collect();
    let d: Vec<Complex64> = jet.derivative.iter().map(|c| c / s).collect();
    let nv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    wedge_norm_sqr(&v, &d) / (nv * nv) / PI
}

/// Five-point finite-difference Laplacian of `(1/4pi) log(1 + sum |f_i|^2)`
/// in the affine chart `z_0 != 0`.
///
/// This is an independent cross-check of [`energy_density`], not a
/// production path: it needs the chart and loses accuracy as `h` shrinks.
pub fn energy_density_fd(curve: &CurveFamily, z: Complex64, h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::InvalidInput(format!("step {h} must be positive")));
    }
    let potential = |w: Complex64| -> Result<f64> {
        let v = curve.homogeneous_value(w).map_err(|_| Error::Chart(w))?;
        let v0 = v[0];
        let scale = max_abs(&v);
        if v0.norm() <= 1e-12 * scale {
            return Err(Error::Chart(w));
        }
        let s: f64 = v.iter().map(|c| (c / v0).norm_sqr()).sum();
        Ok(s.ln())
    };
    let c = potential(z)?;
    let e = potential(z + h)?;
    let w = potential(z - h)?;
    let n = potential(z + Complex64::new(0.0, h))?;
    let s = potential(z - Complex64::new(0.0, h))?;
    let lap = (e + w + n + s - 4.0 * c) / (h * h);
    Ok(lap / (4.0 * PI))
}
