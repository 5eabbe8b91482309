//! Concrete holomorphic curves `C -> CP^N` with exact first-order jets.
//!
//! Five families are supported: constant maps, polynomial (rational) curves,
//! exponential curves `[c_0 e^{a_0 z} : ... : c_N e^{a_N z}]`, the Weierstrass
//! curve `[1 : wp(z)]` of a lattice, and the cubic-pole lattice family
//!
//! ```text
//! f_a(z) = [1 : N^{-1/2} sum_lambda a_{1 lambda} (z - lambda)^{-3} : ... ]
//! ```
//!
//! with coefficients in the annulus `A <= |a| <= 2A`. Near each lattice point
//! the lattice family is evaluated in the pole-free chart
//! `[(z - lambda_0)^3 : g_1 : ... : g_N]`, `g_n = (z - lambda_0)^3 f_n`.

pub mod coeffs;
pub mod lattice;
pub mod sums;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use coeffs::{CoefficientPattern, DEFAULT_RANDOM_PERIOD, GENERATOR_ID};
pub use lattice::{lattice_points_in_disk, lattice_sum_tail_bound, Lattice, LatticePoint, Nearest};
pub use sums::PeriodicSums;

use crate::error::{Error, Result};
use crate::projgeom::{energy_density, ProjectiveJet, ProjectivePoint};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default bound on the truncation error of lattice-family sums.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

/// Reparametrisation `z -> z / scale + offset` applied before evaluating the
/// underlying map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reparam {
    pub scale: f64,
    pub offset: Complex64,
}

impl Default for Reparam {
    fn default() -> Self {
        Self {
            scale: 1.0,
            offset: ZERO,
        }
    }
}

impl Reparam {
    fn apply(&self, z: Complex64) -> Complex64 {
        z / self.scale + self.offset
    }

    fn invert(&self, w: Complex64) -> Complex64 {
        (w - self.offset) * self.scale
    }

    fn is_identity(&self) -> bool {
        self.scale == 1.0 && self.offset == ZERO
    }
}

fn is_default_reparam(r: &Reparam) -> bool {
    r.is_identity()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub coeff: Complex64,
    pub rate: Complex64,
}

/// Serialized form of [`WeierstrassCurve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassSpec {
    pub lattice: Lattice,
    #[serde(default, skip_serializing_if = "is_default_reparam")]
    pub reparam: Reparam,
}

/// The curve `z -> [1 : wp(z / scale + offset)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeierstrassSpec", into = "WeierstrassSpec")]
pub struct WeierstrassCurve {
    lattice: Lattice,
    reparam: Reparam,
    sums: PeriodicSums,
}

impl TryFrom<WeierstrassSpec> for WeierstrassCurve {
    type Error = Error;
    fn try_from(s: WeierstrassSpec) -> Result<Self> {
        let sums = PeriodicSums::new(&s.lattice, 1e-15)?;
        Ok(Self {
            lattice: s.lattice,
            reparam: s.reparam,
            sums,
        })
    }
}

impl From<WeierstrassCurve> for WeierstrassSpec {
    fn from(w: WeierstrassCurve) -> Self {
        WeierstrassSpec {
            lattice: w.lattice,
            reparam: w.reparam,
        }
    }
}

impl WeierstrassCurve {
    pub fn new(lattice: Lattice) -> Result<Self> {
        WeierstrassSpec {
            lattice,
            reparam: Reparam::default(),
        }
        .try_into()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// `(wp(w), wp'(w))` in the curve's own coordinate `w`.
    pub fn wp(&self, w: Complex64) -> (Complex64, Complex64) {
        self.sums.wp(w)
    }
}

/// Serialized form of [`LatticeFamily`]: the coefficients are regenerated
/// from the pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeFamilySpec {
    pub lattice: Lattice,
    pub amplitude: f64,
    pub dim: usize,
    pub pattern: CoefficientPattern,
    #[serde(default = "default_tail_tolerance")]
    pub tail_tolerance: f64,
    #[serde(default, skip_serializing_if = "is_default_reparam")]
    pub reparam: Reparam,
}

fn default_tail_tolerance() -> f64 {
    DEFAULT_TAIL_TOLERANCE
}

/// The cubic-pole family `f_a` with coefficients periodic under
/// `period * Lambda`.
///
/// Each coordinate is `N^{-1/2} sum_cells a_{n,cell} S_3(z - lambda_cell)`
/// where `S_3` is the cubic sum over the sublattice, evaluated by
/// [`PeriodicSums`]. The stored `tail_bound` bounds the truncation error of
/// every coordinate and of its derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeFamilySpec", into = "LatticeFamilySpec")]
pub struct LatticeFamily {
    spec: LatticeFamilySpec,
    period: usize,
    coeffs: Vec<Complex64>,
    cells: Vec<LatticePoint>,
    sums: PeriodicSums,
    tail_bound: f64,
}

impl TryFrom<LatticeFamilySpec> for LatticeFamily {
    type Error = Error;
    fn try_from(spec: LatticeFamilySpec) -> Result<Self> {
        Self::build(spec, None)
    }
}

impl From<LatticeFamily> for LatticeFamilySpec {
    fn from(f: LatticeFamily) -> Self {
        f.spec
    }
}

impl LatticeFamily {
    pub fn new(
        lattice: Lattice,
        amplitude: f64,
        dim: usize,
        pattern: CoefficientPattern,
    ) -> Result<Self> {
        LatticeFamilySpec {
            lattice,
            amplitude,
            dim,
            pattern,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            reparam: Reparam::default(),
        }
        .try_into()
    }

    /// Builds the family with an explicit number of rows in the lattice sums
    /// instead of deriving it from the tolerance.
    pub fn with_rows(spec: LatticeFamilySpec, rows: i64) -> Result<Self> {
        Self::build(spec, Some(rows))
    }

    fn build(spec: LatticeFamilySpec, rows: Option<i64>) -> Result<Self> {
        if !(spec.tail_tolerance > 0.0) {
            return Err(Error::InvalidInput("tail tolerance must be positive".into()));
        }
        if !(spec.reparam.scale > 0.0) {
            return Err(Error::InvalidInput("reparametrisation scale must be positive".into()));
        }
        let coeffs = spec.pattern.materialize(spec.amplitude, spec.dim)?;
        let period = spec.pattern.period();
        let lat = &spec.lattice;
        let superlattice = lat.scaled(period as f64)?;
        // per-coordinate error <= (cells * 2A / sqrt N) * (error of one sum),
        // derivatives carry an extra factor 3
        let weight = 3.0 * (period * period) as f64 * 2.0 * spec.amplitude / (spec.dim as f64).sqrt();
        let sums = match rows {
            Some(r) => PeriodicSums::with_rows(&superlattice, r),
            None => PeriodicSums::new(&superlattice, (spec.tail_tolerance / weight).max(1e-300))?,
        };
        let tail_bound = weight * sums.row_tail_bound();
        if rows.is_none() && tail_bound > spec.tail_tolerance {
            return Err(Error::InvalidInput(format!(
                "tail bound {tail_bound:e} exceeds tolerance {:e}",
                spec.tail_tolerance
            )));
        }
        let mut cells = Vec::with_capacity(period * period);
        for i in 0..period as i64 {
            for j in 0..period as i64 {
                cells.push(LatticePoint {
                    i,
                    j,
                    z: lat.point(i, j),
                });
            }
        }
        Ok(Self {
            spec,
            period,
            coeffs,
            cells,
            sums,
            tail_bound,
        })
    }

    pub fn spec(&self) -> &LatticeFamilySpec {
        &self.spec
    }

    pub fn lattice(&self) -> &Lattice {
        &self.spec.lattice
    }

    pub fn amplitude(&self) -> f64 {
        self.spec.amplitude
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Bound on the truncation error of each coordinate and derivative.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient vector `(a_{1 lambda}, ..., a_{N lambda})` at the lattice
    /// point with user coordinates `(i, j)`.
    pub fn coefficient_at(&self, i: i64, j: i64) -> &[Complex64] {
        let m = self.period as i64;
        let cell = (i.rem_euclid(m) * m + j.rem_euclid(m)) as usize;
        &self.coeffs[cell * self.spec.dim..(cell + 1) * self.spec.dim]
    }

    fn cell_index(&self, p: &LatticePoint) -> usize {
        let m = self.period as i64;
        (p.i.rem_euclid(m) * m + p.j.rem_euclid(m)) as usize
    }

    /// Affine coordinates `f_n(w)` and `f_n'(w)` (derivative in `w`).
    fn affine(&self, w: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.spec.dim;
        let norm = 1.0 / (n as f64).sqrt();
        let mut f = vec![ZERO; n];
        let mut df = vec![ZERO; n];
        for (cell, p) in self.cells.iter().enumerate() {
            let (s3, s4) = self.sums.cubic_quartic(w - p.z);
            let a = &self.coeffs[cell * n..(cell + 1) * n];
            for k in 0..n {
                f[k] += a[k] * s3;
                df[k] -= a[k] * s4 * 3.0;
            }
        }
        for k in 0..n {
            f[k] *= norm;
            df[k] *= norm;
        }
        (f, df)
    }

    /// Pole-free chart around the lattice point `center` (curve coordinate
    /// `w`, `v = w - center`): returns `(g, g')` with derivatives in `w`.
    fn chart_at(&self, center: &LatticePoint, v: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.spec.dim;
        let norm = 1.0 / (n as f64).sqrt();
        let home = self.cell_index(center);
        let w = center.z + v;
        let v2 = v * v;
        let v3 = v2 * v;
        let mut g = vec![ZERO; n];
        let mut dg = vec![ZERO; n];
        for (cell, p) in self.cells.iter().enumerate() {
            let a = &self.coeffs[cell * n..(cell + 1) * n];
            if cell == home {
                let (p3, p4) = self.sums.punctured_cubic_quartic(v);
                let val = ONE + v3 * p3;
                let der = (v2 * p3 - v3 * p4) * 3.0;
                for k in 0..n {
                    g[k] += a[k] * val;
                    dg[k] += a[k] * der;
                }
            } else {
                let (s3, s4) = self.sums.cubic_quartic(w - p.z);
                let val = v3 * s3;
                let der = (v2 * s3 - v3 * s4) * 3.0;
                for k in 0..n {
                    g[k] += a[k] * val;
                    dg[k] += a[k] * der;
                }
            }
        }
        for k in 0..n {
            g[k] *= norm;
            dg[k] *= norm;
        }
        (g, dg)
    }
}

/// Data of the local chart of a lattice-family curve near a lattice point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartData {
    /// The lattice point, in the curve's `z` coordinate.
    pub center: Complex64,
    /// `g_n`, pole-free.
    pub values: Vec<Complex64>,
    /// `dg_n / dz`.
    pub derivatives: Vec<Complex64>,
    /// `(w - lambda_0)^3` in the curve's own coordinate `w`.
    pub factor: Complex64,
    /// `d/dz (w - lambda_0)^3`.
    pub factor_derivative: Complex64,
}

impl ChartData {
    pub fn jet(&self) -> Result<ProjectiveJet> {
        let mut value = Vec::with_capacity(self.values.len() + 1);
        value.push(self.factor);
        value.extend_from_slice(&self.values);
        let mut derivative = Vec::with_capacity(self.values.len() + 1);
        derivative.push(self.factor_derivative);
        derivative.extend_from_slice(&self.derivatives);
        ProjectiveJet::with_chart_scale(value, derivative, self.factor)
    }
}

/// A concrete holomorphic curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveFamily {
    Constant { point: ProjectivePoint },
    /// Homogeneous polynomial coordinates, coefficients in ascending degree.
    Rational { polys: Vec<Vec<Complex64>> },
    Exponential { terms: Vec<ExpTerm> },
    WeierstrassP(WeierstrassCurve),
    LatticeFamily(LatticeFamily),
}

/// How the energy density of a curve is distributed, used to lay out
/// quadrature and search grids.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureScale {
    /// The density vanishes identically.
    Zero,
    /// Structure of size about `scale` inside radius `radius`, decaying
    /// outside it.
    Localized { scale: f64, radius: f64 },
    /// Structure of size `scale` spread over the whole plane.
    Planar { scale: f64 },
}

fn horner(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = ZERO;
    let mut d = ZERO;
    for &c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

/// Coefficients of `p(z + a)`.
fn taylor_shift(p: &[Complex64], a: Complex64) -> Vec<Complex64> {
    let mut q = p.to_vec();
    let n = q.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let t = q[j + 1] * a;
            q[j] += t;
        }
    }
    q
}

impl CurveFamily {
    pub fn constant(point: ProjectivePoint) -> Self {
        CurveFamily::Constant { point }
    }

    /// Polynomial curve; each entry of `polys` lists coefficients in
    /// ascending degree.
    pub fn rational(polys: Vec<Vec<Complex64>>) -> Result<Self> {
        if polys.len() < 2 {
            return Err(Error::InvalidInput("a curve needs at least two coordinates".into()));
        }
        let polys: Vec<Vec<Complex64>> = polys
            .into_iter()
            .map(|mut p| {
                while p.len() > 1 && p.last() == Some(&ZERO) {
                    p.pop();
                }
                if p.is_empty() {
                    p.push(ZERO);
                }
                p
            })
            .collect();
        if polys.iter().all(|p| p.iter().all(|c| *c == ZERO)) {
            return Err(Error::InvalidPoint);
        }
        Ok(CurveFamily::Rational { polys })
    }

    /// `[1 : z^d]`.
    pub fn monomial(degree: usize) -> Self {
        let mut p = vec![ZERO; degree + 1];
        p[degree] = ONE;
        CurveFamily::Rational {
            polys: vec![vec![ONE], p],
        }
    }

    pub fn exponential(terms: Vec<ExpTerm>) -> Result<Self> {
        if terms.len() < 2 {
            return Err(Error::InvalidInput("a curve needs at least two coordinates".into()));
        }
        if terms.iter().all(|t| t.coeff == ZERO) {
            return Err(Error::InvalidPoint);
        }
        Ok(CurveFamily::Exponential { terms })
    }

    /// `[1 : e^{rate z}]`.
    pub fn exp_line(rate: Complex64) -> Self {
        CurveFamily::Exponential {
            terms: vec![
                ExpTerm {
                    coeff: ONE,
                    rate: ZERO,
                },
                ExpTerm { coeff: ONE, rate },
            ],
        }
    }

    pub fn weierstrass(lattice: Lattice) -> Result<Self> {
        Ok(CurveFamily::WeierstrassP(WeierstrassCurve::new(lattice)?))
    }

    pub fn lattice_family(
        lattice: Lattice,
        amplitude: f64,
        dim: usize,
        pattern: CoefficientPattern,
    ) -> Result<Self> {
        Ok(CurveFamily::LatticeFamily(LatticeFamily::new(
            lattice, amplitude, dim, pattern,
        )?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CurveFamily::Constant { .. } => "constant",
            CurveFamily::Rational { .. } => "rational",
            CurveFamily::Exponential { .. } => "exponential",
            CurveFamily::WeierstrassP(_) => "weierstrass_p",
            CurveFamily::LatticeFamily(_) => "lattice_family",
        }
    }

    /// Dimension `N` of the target `CP^N`.
    pub fn dim(&self) -> usize {
        match self {
            CurveFamily::Constant { point } => point.dim(),
            CurveFamily::Rational { polys } => polys.len() - 1,
            CurveFamily::Exponential { terms } => terms.len() - 1,
            CurveFamily::WeierstrassP(_) => 1,
            CurveFamily::LatticeFamily(f) => f.dim(),
        }
    }

    fn reparam(&self) -> Option<&Reparam> {
        match self {
            CurveFamily::WeierstrassP(w) => Some(&w.reparam),
            CurveFamily::LatticeFamily(f) => Some(&f.spec.reparam),
            _ => None,
        }
    }

    /// Lattice of poles (in the curve's own coordinate) for pole-bearing
    /// families.
    pub fn pole_lattice(&self) -> Option<&Lattice> {
        match self {
            CurveFamily::WeierstrassP(w) => Some(&w.lattice),
            CurveFamily::LatticeFamily(f) => Some(f.lattice()),
            _ => None,
        }
    }

    /// Exact jet of the natural lift. Pole-bearing families refuse points
    /// within `delta / 4` of a pole; use [`CurveFamily::eval_chart`] or
    /// [`CurveFamily::local_jet`] there.
    pub fn eval_jet(&self, z: Complex64) -> Result<ProjectiveJet> {
        match self {
            CurveFamily::Constant { point } => {
                ProjectiveJet::new(point.coords().to_vec(), vec![ZERO; point.coords().len()])
            }
            CurveFamily::Rational { polys } => {
                let (v, d): (Vec<_>, Vec<_>) = polys.iter().map(|p| horner(p, z)).unzip();
                let scale = v[0];
                ProjectiveJet::with_chart_scale(v, d, scale)
            }
            CurveFamily::Exponential { terms } => {
                let shift = terms
                    .iter()
                    .filter(|t| t.coeff != ZERO)
                    .map(|t| (t.rate * z).re)
                    .fold(f64::NEG_INFINITY, f64::max);
                let v: Vec<Complex64> = terms
                    .iter()
                    .map(|t| t.coeff * (t.rate * z - shift).exp())
                    .collect();
                let d = terms.iter().zip(&v).map(|(t, x)| t.rate * x).collect();
                let scale = v[0];
                ProjectiveJet::with_chart_scale(v, d, scale)
            }
            CurveFamily::WeierstrassP(c) => {
                let w = c.reparam.apply(z);
                self.check_pole_distance(z, w)?;
                let (p, dp) = c.sums.wp(w);
                ProjectiveJet::new(vec![ONE, p], vec![ZERO, dp / c.reparam.scale])
            }
            CurveFamily::LatticeFamily(f) => {
                let w = f.spec.reparam.apply(z);
                self.check_pole_distance(z, w)?;
                let (vals, ders) = f.affine(w);
                let mut value = vec![ONE];
                value.extend(vals);
                let mut derivative = vec![ZERO];
                derivative.extend(ders.into_iter().map(|d| d / f.spec.reparam.scale));
                ProjectiveJet::new(value, derivative)
            }
        }
    }

    fn check_pole_distance(&self, z: Complex64, w: Complex64) -> Result<()> {
        let lat = self.pole_lattice().expect("pole-bearing family");
        let near = lat.nearest(w);
        if near.distance < lat.delta() / 4.0 {
            let r = self.reparam().expect("pole-bearing family");
            return Err(Error::PoleProximity {
                z,
                pole: r.invert(near.point.z),
                distance: near.distance * r.scale,
            });
        }
        Ok(())
    }

    /// Pole-free chart of a lattice-family curve near the lattice point
    /// closest to `z`.
    pub fn eval_chart(&self, z: Complex64) -> Result<ChartData> {
        let f = match self {
            CurveFamily::LatticeFamily(f) => f,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "eval_chart needs a lattice family, got {}",
                    self.kind()
                )))
            }
        };
        let r = &f.spec.reparam;
        let w = r.apply(z);
        let near = f.lattice().nearest(w);
        if near.ambiguous {
            return Err(Error::AmbiguousNearest(z));
        }
        if near.distance >= f.lattice().delta() {
            return Err(Error::InvalidInput(format!(
                "{z} is not within delta of a lattice point"
            )));
        }
        let v = w - near.point.z;
        let (values, ders) = f.chart_at(&near.point, v);
        Ok(ChartData {
            center: r.invert(near.point.z),
            values,
            derivatives: ders.into_iter().map(|d| d / r.scale).collect(),
            factor: v * v * v,
            factor_derivative: 3.0 * v * v / r.scale,
        })
    }

    /// Jet at any point of the plane, switching to a pole-free lift near
    /// the poles of the Weierstrass and lattice families.
    pub fn local_jet(&self, z: Complex64) -> Result<ProjectiveJet> {
        match self {
            CurveFamily::WeierstrassP(c) => {
                let w = c.reparam.apply(z);
                let (p, dp) = c.sums.wp(w);
                if !p.is_finite() || !dp.is_finite() {
                    // exactly at a pole
                    return ProjectiveJet::with_chart_scale(vec![ZERO, ONE], vec![ZERO, ZERO], ZERO);
                }
                let dp = dp / c.reparam.scale;
                if p.norm() > 1.0 {
                    let inv = p.inv();
                    ProjectiveJet::with_chart_scale(vec![inv, ONE], vec![-dp * inv * inv, ZERO], inv)
                } else {
                    ProjectiveJet::new(vec![ONE, p], vec![ZERO, dp])
                }
            }
            CurveFamily::LatticeFamily(f) => {
                let w = f.spec.reparam.apply(z);
                let near = f.lattice().nearest(w);
                if near.distance < f.lattice().delta() / 2.0 {
                    let v = w - near.point.z;
                    let (values, ders) = f.chart_at(&near.point, v);
                    let s = f.spec.reparam.scale;
                    let mut value = vec![v * v * v];
                    value.extend(values);
                    let mut derivative = vec![3.0 * v * v / s];
                    derivative.extend(ders.into_iter().map(|d| d / s));
                    ProjectiveJet::with_chart_scale(value, derivative, v * v * v)
                } else {
                    self.eval_jet(z)
                }
            }
            _ => self.eval_jet(z),
        }
    }

    /// `|df|^2(z)` at any point of the plane.
    pub fn energy_density(&self, z: Complex64) -> Result<f64> {
        match self {
            CurveFamily::Constant { .. } => return Ok(0.0),
            CurveFamily::WeierstrassP(c) => {
                let (p, dp) = c.sums.wp(c.reparam.apply(z));
                if !p.is_finite() || !dp.is_finite() {
                    return Ok(0.0);
                }
                let dp = dp / c.reparam.scale;
                // |g'|^2 / (1 + |g|^2)^2 is the same for g = wp and g = 1/wp
                let (g, dg) = if p.norm() > 1.0 {
                    let inv = p.inv();
                    (inv, -dp * inv * inv)
                } else {
                    (p, dp)
                };
                let s = 1.0 + g.norm_sqr();
                return Ok(dg.norm_sqr() / (s * s) / std::f64::consts::PI);
            }
            _ => {}
        }
        Ok(energy_density(&self.local_jet(z)?))
    }

    /// `|df|(z)`.
    pub fn derivative_norm(&self, z: Complex64) -> Result<f64> {
        Ok(self.energy_density(z)?.sqrt())
    }

    /// Homogeneous value of the natural lift (as used by [`Self::eval_jet`]).
    pub fn homogeneous_value(&self, z: Complex64) -> Result<Vec<Complex64>> {
        Ok(self.eval_jet(z)?.lift().to_vec())
    }

    /// Projective value at any point of the plane.
    pub fn value(&self, z: Complex64) -> Result<ProjectivePoint> {
        Ok(self.local_jet(z)?.point())
    }

    /// The curve `z -> f(z / c)`.
    pub fn rescale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidInput(format!("rescale factor {c} must be positive")));
        }
        Ok(match self {
            CurveFamily::Constant { .. } => self.clone(),
            CurveFamily::Rational { polys } => CurveFamily::Rational {
                polys: polys
                    .iter()
                    .map(|p| {
                        p.iter()
                            .enumerate()
                            .map(|(k, a)| a / c.powi(k as i32))
                            .collect()
                    })
                    .collect(),
            },
            CurveFamily::Exponential { terms } => CurveFamily::Exponential {
                terms: terms
                    .iter()
                    .map(|t| ExpTerm {
                        coeff: t.coeff,
                        rate: t.rate / c,
                    })
                    .collect(),
            },
            CurveFamily::WeierstrassP(w) => {
                let mut w = w.clone();
                w.reparam.scale *= c;
                CurveFamily::WeierstrassP(w)
            }
            CurveFamily::LatticeFamily(f) => {
                let mut f = f.clone();
                f.spec.reparam.scale *= c;
                CurveFamily::LatticeFamily(f)
            }
        })
    }

    /// The curve `z -> f(z + a)`.
    pub fn translate(&self, a: Complex64) -> Self {
        match self {
            CurveFamily::Constant { .. } => self.clone(),
            CurveFamily::Rational { polys } => CurveFamily::Rational {
                polys: polys.iter().map(|p| taylor_shift(p, a)).collect(),
            },
            CurveFamily::Exponential { terms } => CurveFamily::Exponential {
                terms: terms
                    .iter()
                    .map(|t| ExpTerm {
                        coeff: t.coeff * (t.rate * a).exp(),
                        rate: t.rate,
                    })
                    .collect(),
            },
            CurveFamily::WeierstrassP(w) => {
                let mut w = w.clone();
                w.reparam.offset += a / w.reparam.scale;
                CurveFamily::WeierstrassP(w)
            }
            CurveFamily::LatticeFamily(f) => {
                let mut f = f.clone();
                f.spec.reparam.offset += a / f.spec.reparam.scale;
                CurveFamily::LatticeFamily(f)
            }
        }
    }

    /// Generators of a period lattice in the `z` plane, if the energy
    /// density is doubly periodic.
    pub fn period_cell(&self) -> Option<(Complex64, Complex64, Complex64)> {
        match self {
            CurveFamily::WeierstrassP(w) => {
                let r = &w.reparam;
                Some((r.invert(ZERO), w.lattice.omega1() * r.scale, w.lattice.omega2() * r.scale))
            }
            CurveFamily::LatticeFamily(f) => {
                let r = &f.spec.reparam;
                let m = f.period as f64 * r.scale;
                Some((r.invert(ZERO), f.lattice().omega1() * m, f.lattice().omega2() * m))
            }
            _ => None,
        }
    }

    /// Generators of the pole lattice in the `z` plane, with the origin of
    /// the lattice.
    pub fn lattice_cell(&self) -> Option<(Complex64, Complex64, Complex64)> {
        let r = self.reparam()?;
        let lat = self.pole_lattice()?;
        Some((r.invert(ZERO), lat.omega1() * r.scale, lat.omega2() * r.scale))
    }

    /// Distances from the origin of the poles in the closed disk of radius
    /// `radius` (in the `z` plane), sorted and deduplicated.
    pub fn pole_radii(&self, radius: f64) -> Vec<f64> {
        let (Some(r), Some(lat)) = (self.reparam(), self.pole_lattice()) else {
            return Vec::new();
        };
        let mut out: Vec<f64> = lat
            .points_near(r.offset, radius / r.scale)
            .iter()
            .map(|p| r.invert(p.z).norm())
            .filter(|&x| x <= radius)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }

    pub fn feature_scale(&self) -> FeatureScale {
        match self {
            CurveFamily::Constant { .. } => FeatureScale::Zero,
            CurveFamily::Rational { polys } => {
                let nonconstant = polys.iter().any(|p| p.len() > 1);
                let proportional = polys.iter().all(|p| p.len() <= 1);
                if !nonconstant || proportional {
                    return FeatureScale::Zero;
                }
                // Cauchy bound on the roots of every coordinate
                let radius = polys
                    .iter()
                    .filter(|p| p.len() > 1)
                    .map(|p| {
                        let lead = p.last().unwrap().norm();
                        1.0 + p[..p.len() - 1].iter().map(|c| c.norm() / lead).fold(0.0, f64::max)
                    })
                    .fold(1.0, f64::max);
                FeatureScale::Localized {
                    scale: 0.25 * radius.min(4.0),
                    radius,
                }
            }
            CurveFamily::Exponential { terms } => {
                let live: Vec<_> = terms.iter().filter(|t| t.coeff != ZERO).collect();
                let mut spread = 0.0f64;
                for a in &live {
                    for b in &live {
                        spread = spread.max((a.rate - b.rate).norm());
                    }
                }
                if spread == 0.0 {
                    FeatureScale::Zero
                } else {
                    FeatureScale::Planar { scale: 1.0 / spread }
                }
            }
            CurveFamily::WeierstrassP(w) => FeatureScale::Planar {
                scale: w.lattice.delta() * w.reparam.scale,
            },
            CurveFamily::LatticeFamily(f) => FeatureScale::Planar {
                scale: f.lattice().delta() * f.spec.reparam.scale,
            },
        }
    }

    /// True when the density is invariant under the pole lattice (constant
    /// coefficient patterns and the Weierstrass curve).
    pub fn is_lattice_periodic(&self) -> bool {
        match self {
            CurveFamily::WeierstrassP(_) => true,
            CurveFamily::LatticeFamily(f) => f.period == 1,
            _ => false,
        }
    }
}

/// Free-function form of [`CurveFamily::eval_jet`].
pub fn eval_jet(curve: &CurveFamily, z: Complex64) -> Result<ProjectiveJet> {
    curve.eval_jet(z)
}

/// Free-function form of [`CurveFamily::eval_chart`].
pub fn eval_chart(curve: &CurveFamily, z: Complex64) -> Result<ChartData> {
    curve.eval_chart(z)
}

/// Free-function form of [`CurveFamily::rescale`].
pub fn rescale(curve: &CurveFamily, c: f64) -> Result<CurveFamily> {
    curve.rescale(c)
}
