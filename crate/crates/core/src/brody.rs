//! Sup-norm estimates of `|df|`, Brody rescaling, the N-independence
//! experiment for the lattice family and the mean-dimension bound report.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{CoefficientPattern, CurveFamily, FeatureScale, Lattice, DEFAULT_RANDOM_PERIOD};
use crate::error::{Error, Result};
use crate::projgeom::ProjectiveJet;

pub const MIN_LEVELS: usize = 3;
pub const MAX_LEVELS: usize = 30;
/// Consecutive levels with change below tolerance needed to stop.
pub const QUIET_LEVELS: usize = 3;
/// Cap on grid points per axis of the coarse grid.
const MAX_COARSE: usize = 400;
/// Newton steps taken from every coarse grid point.
const NEWTON_STEPS: usize = 10;

/// Region scanned by [`sup_norm_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum Region {
    /// Axis-parallel rectangle with opposite corners `min` and `max`.
    Rectangle { min: Complex64, max: Complex64 },
    /// One fundamental parallelogram of the pole lattice; the density must
    /// be invariant under the lattice.
    FundamentalDomain,
    /// A `k x k` block of fundamental domains centred on the origin cell.
    PeriodBlock { k: u32 },
}

/// Result of a grid sup-norm scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupNormReport {
    pub curve: String,
    pub region: Region,
    pub levels: usize,
    pub sup_estimate: f64,
    pub argmax: Complex64,
    pub refinement_deltas: Vec<f64>,
    pub converged: bool,
}

/// Parallelogram `origin + s a + t b`, `(s, t)` in `[s0, s1] x [t0, t1]`.
struct Patch {
    origin: Complex64,
    a: Complex64,
    b: Complex64,
    s: (f64, f64),
    t: (f64, f64),
}

impl Patch {
    fn point(&self, s: f64, t: f64) -> Complex64 {
        self.origin + self.a * s + self.b * t
    }
}

fn patch_for(curve: &CurveFamily, region: &Region) -> Result<Patch> {
    match *region {
        Region::Rectangle { min, max } => {
            if !(max.re > min.re && max.im > min.im) {
                return Err(Error::InvalidInput("rectangle must have positive area".into()));
            }
            Ok(Patch {
                origin: Complex64::new(0.0, 0.0),
                a: Complex64::new(1.0, 0.0),
                b: Complex64::new(0.0, 1.0),
                s: (min.re, max.re),
                t: (min.im, max.im),
            })
        }
        Region::FundamentalDomain => {
            if !curve.is_lattice_periodic() {
                return Err(Error::InvalidInput(
                    "fundamental-domain scans need a lattice-periodic curve".into(),
                ));
            }
            let (origin, a, b) = curve.lattice_cell().expect("periodic curves have a lattice");
            Ok(Patch {
                origin,
                a,
                b,
                s: (0.0, 1.0),
                t: (0.0, 1.0),
            })
        }
        Region::PeriodBlock { k } => {
            if k == 0 {
                return Err(Error::InvalidInput("period block needs k >= 1".into()));
            }
            let (origin, a, b) = curve
                .lattice_cell()
                .ok_or_else(|| Error::InvalidInput(format!("{} has no lattice", curve.kind())))?;
            let lo = -(((k - 1) / 2) as f64);
            let hi = lo + k as f64;
            Ok(Patch {
                origin,
                a,
                b,
                s: (lo, hi),
                t: (lo, hi),
            })
        }
    }
}

fn cross(x: Complex64, y: Complex64) -> f64 {
    x.re * y.im - x.im * y.re
}

/// Offset to the point where the tangent line of the jet, written in the
/// affine chart of coordinate `chart` (the largest coordinate if `None`),
/// comes closest to the chart origin; the density of that line peaks there.
/// Near an isolated spike of `|df|` this is a Newton step towards it.
fn newton_offset(jet: &ProjectiveJet, chart: Option<usize>) -> Option<Complex64> {
    let v = jet.lift();
    let d = jet.derivative();
    let k = match chart {
        Some(k) => k,
        None => (0..v.len()).max_by(|&i, &j| v[i].norm_sqr().total_cmp(&v[j].norm_sqr()))?,
    };
    let (vk, dk) = (v[k], d[k]);
    if vk.norm_sqr() == 0.0 {
        return None;
    }
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for j in (0..v.len()).filter(|&j| j != k) {
        let a = v[j] / vk;
        let b = (d[j] * vk - v[j] * dk) / (vk * vk);
        num += b.conj() * a;
        den += b.norm_sqr();
    }
    if den > 0.0 && num.is_finite() {
        Some(-num / den)
    } else {
        None
    }
}

/// Grid maximum of `|df|` over `region`.
///
/// A coarse grid of spacing a quarter of the curve's feature scale is
/// evaluated, and from every grid point Newton sequences (see
/// [`newton_offset`]) look for spikes narrower than the grid. Every grid
/// local maximum and every Newton end point seeds a basin; each basin is then
/// refined on its own with the spacing halved per level. The scan stops once
/// the overall maximum has changed by less than `tol` for
/// [`QUIET_LEVELS`] consecutive levels.
pub fn sup_norm_estimate(curve: &CurveFamily, region: &Region, tol: f64) -> Result<SupNormReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    let patch = patch_for(curve, region)?;
    let mut report = SupNormReport {
        curve: curve.kind().to_string(),
        region: *region,
        levels: 0,
        sup_estimate: 0.0,
        argmax: patch.point(patch.s.0, patch.t.0),
        refinement_deltas: Vec::new(),
        converged: true,
    };
    let scale = match curve.feature_scale() {
        FeatureScale::Zero => return Ok(report),
        FeatureScale::Localized { scale, .. } | FeatureScale::Planar { scale } => scale,
    };
    let h0 = scale / 4.0;
    let len_s = patch.a.norm() * (patch.s.1 - patch.s.0);
    let len_t = patch.b.norm() * (patch.t.1 - patch.t.0);
    let ns = ((len_s / h0).ceil() as usize).clamp(4, MAX_COARSE);
    let nt = ((len_t / h0).ceil() as usize).clamp(4, MAX_COARSE);
    let (mut ds, mut dt) = ((patch.s.1 - patch.s.0) / ns as f64, (patch.t.1 - patch.t.0) / nt as f64);

    let eval = |s: f64, t: f64| -> Result<f64> { Ok(curve.energy_density(patch.point(s, t))?.sqrt()) };
    let det = cross(patch.a, patch.b);
    let inside = |s: f64, t: f64| s >= patch.s.0 && s <= patch.s.1 && t >= patch.t.0 && t <= patch.t.1;
    // Newton target of the point (s, t) if it moves at most `reach` in z
    let newton = |s: f64, t: f64, reach: f64, chart: Option<usize>| -> Result<Option<(f64, f64)>> {
        let jet = curve.local_jet(patch.point(s, t))?;
        Ok(newton_offset(&jet, chart).and_then(|dz| {
            if dz.norm() > reach {
                return None;
            }
            let (ns, nt) = (s + cross(dz, patch.b) / det, t + cross(patch.a, dz) / det);
            inside(ns, nt).then_some((ns, nt))
        }))
    };

    let reach = 2.0 * h0;
    let cells: Vec<(f64, Vec<(f64, f64, f64)>)> = (0..=ns)
        .into_par_iter()
        .flat_map_iter(|i| (0..=nt).map(move |j| (i, j)))
        .map(|(i, j)| -> Result<(f64, Vec<(f64, f64, f64)>)> {
            let s = patch.s.0 + i as f64 * ds;
            let t = patch.t.0 + j as f64 * dt;
            let value = eval(s, t)?;
            let mut ends = Vec::new();
            for chart in [Some(0), None] {
                let (mut cs, mut ct) = (s, t);
                for _ in 0..NEWTON_STEPS {
                    match newton(cs, ct, reach, chart)? {
                        Some((ns, nt)) => {
                            cs = ns;
                            ct = nt;
                        }
                        None => break,
                    }
                }
                if (cs, ct) != (s, t) {
                    ends.push((eval(cs, ct)?, cs, ct));
                }
            }
            Ok((value, ends))
        })
        .collect::<Result<_>>()?;
    let at = |i: usize, j: usize| cells[i * (nt + 1) + j].0;
    let mut seeds: Vec<(f64, f64, f64)> = Vec::new();
    for i in 0..=ns {
        for j in 0..=nt {
            let v = at(i, j);
            let mut peak = true;
            for (di, dj) in [(-1i64, -1i64), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)] {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if a >= 0 && b >= 0 && a <= ns as i64 && b <= nt as i64 && at(a as usize, b as usize) > v {
                    peak = false;
                }
            }
            if peak {
                seeds.push((v, patch.s.0 + i as f64 * ds, patch.t.0 + j as f64 * dt));
            }
            seeds.extend(cells[i * (nt + 1) + j].1.iter().copied());
        }
    }
    let order = |x: &(f64, f64, f64), y: &(f64, f64, f64)| {
        y.0.total_cmp(&x.0).then(x.1.total_cmp(&y.1)).then(x.2.total_cmp(&y.2))
    };
    let mut basins = distinct(seeds, &patch, 0.25 * h0, order);
    let mut sup = basins[0].0;
    report.levels = 1;
    report.converged = false;
    for level in 2..=MAX_LEVELS {
        ds *= 0.5;
        dt *= 0.5;
        let step = ds.max(dt) * patch.a.norm().max(patch.b.norm());
        basins = basins
            .par_iter()
            .map(|&(v, s, t)| -> Result<(f64, f64, f64)> {
                let mut grid = [[v; 5]; 5];
                let mut best = (v, s, t);
                for i in -2i32..=2 {
                    for j in -2i32..=2 {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        let ps = (s + i as f64 * ds).clamp(patch.s.0, patch.s.1);
                        let pt = (t + j as f64 * dt).clamp(patch.t.0, patch.t.1);
                        let cand = (eval(ps, pt)?, ps, pt);
                        grid[(i + 2) as usize][(j + 2) as usize] = cand.0;
                        if order(&cand, &best).is_lt() {
                            best = cand;
                        }
                    }
                }
                let mut extra = Vec::with_capacity(3);
                // vertex of the quadratic through the inner 3 x 3 stencil
                let f = |i: usize, j: usize| grid[i + 1][j + 1];
                let (gs, gt) = ((f(2, 1) - f(0, 1)) / 2.0, (f(1, 2) - f(1, 0)) / 2.0);
                let (hss, htt) = (f(2, 1) - 2.0 * v + f(0, 1), f(1, 2) - 2.0 * v + f(1, 0));
                let hst = (f(2, 2) - f(2, 0) - f(0, 2) + f(0, 0)) / 4.0;
                let det_h = hss * htt - hst * hst;
                if hss < 0.0 && det_h > 0.0 {
                    let us = -(htt * gs - hst * gt) / det_h;
                    let ut = -(hss * gt - hst * gs) / det_h;
                    if us.abs() <= 2.0 && ut.abs() <= 2.0 {
                        let p = (s + us * ds, t + ut * dt);
                        if inside(p.0, p.1) {
                            extra.push(p);
                        }
                    }
                }
                for chart in [Some(0), None] {
                    if let Some(p) = newton(s, t, 2.0 * step, chart)? {
                        extra.push(p);
                    }
                }
                for (ps, pt) in extra {
                    let cand = (eval(ps, pt)?, ps, pt);
                    if order(&cand, &best).is_lt() {
                        best = cand;
                    }
                }
                Ok(best)
            })
            .collect::<Result<_>>()?;
        basins = distinct(basins, &patch, 0.25 * step, order);
        let delta = basins[0].0 - sup;
        sup = basins[0].0;
        report.refinement_deltas.push(delta);
        report.levels = level;
        // a level without improvement only says the maximiser is within half
        // a step of the best point, so ask for several quiet levels in a row
        let quiet = report.refinement_deltas.len() >= QUIET_LEVELS
            && report.refinement_deltas[report.refinement_deltas.len() - QUIET_LEVELS..]
                .iter()
                .all(|&d| d < tol);
        if level >= MIN_LEVELS && quiet {
            report.converged = true;
            break;
        }
    }
    report.sup_estimate = sup;
    report.argmax = patch.point(basins[0].1, basins[0].2);
    Ok(report)
}

/// Sorts by `order` and drops points within `radius` of a better one.
fn distinct(
    mut pts: Vec<(f64, f64, f64)>,
    patch: &Patch,
    radius: f64,
    order: impl Fn(&(f64, f64, f64), &(f64, f64, f64)) -> std::cmp::Ordering,
) -> Vec<(f64, f64, f64)> {
    pts.sort_by(&order);
    let mut kept: Vec<(f64, f64, f64)> = Vec::new();
    for p in pts {
        let z = patch.point(p.1, p.2);
        if kept.iter().all(|q| (patch.point(q.1, q.2) - z).norm() > radius) {
            kept.push(p);
        }
    }
    kept
}

/// `z -> f(z / sup)`, which has `|df| <= 1` whenever `sup >= ||df||`.
pub fn brody_rescale(curve: &CurveFamily, sup: f64) -> Result<CurveFamily> {
    if !(sup > 0.0) || !sup.is_finite() {
        return Err(Error::InvalidInput(format!("sup {sup} must be positive")));
    }
    curve.rescale(sup)
}

/// Seed of trial `trial` at dimension `n`, derived from the run seed by a
/// ChaCha stream per dimension.
pub fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    rng.set_word_pos(2 * trial as u128);
    rng.next_u64()
}

/// Parameters of the N-independence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop31Config {
    pub lattice: Lattice,
    pub amplitude: f64,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Allowed ratio of the overall maximum to the `N = 1` baseline.
    pub band_factor: f64,
    pub period: usize,
}

impl Prop31Config {
    pub fn new(lattice: Lattice, amplitude: f64, dims: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self {
            lattice,
            amplitude,
            dims,
            trials,
            seed,
            tol: 1e-6,
            band_factor: 2.0,
            period: DEFAULT_RANDOM_PERIOD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub sup: f64,
    pub converged: bool,
    /// Sup-norm of the draw after rescaling by `sup`.
    pub rescaled_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub max_sup: f64,
    pub mean_sup: f64,
    pub all_converged: bool,
    pub max_rescaled_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop31Report {
    pub config: Prop31Config,
    /// Sup-norm of the constant pattern `a = (A)` at `N = 1`.
    pub constant_baseline: f64,
    /// Largest sup-norm over the `N = 1` random draws.
    pub baseline: f64,
    pub overall_max: f64,
    pub band_ok: bool,
    pub summaries: Vec<DimSummary>,
    pub rows: Vec<TrialRow>,
}

/// Sup-norm of one lattice-family draw over a window on which the density
/// sees every coefficient configuration.
pub fn lattice_family_sup(curve: &CurveFamily, tol: f64) -> Result<SupNormReport> {
    let region = if curve.is_lattice_periodic() {
        Region::FundamentalDomain
    } else {
        match curve {
            CurveFamily::LatticeFamily(f) => Region::PeriodBlock { k: f.period() as u32 },
            _ => Region::PeriodBlock { k: 3 },
        }
    };
    sup_norm_estimate(curve, &region, tol)
}

/// For each `N`, draws `trials` random coefficient patterns and records the
/// sup-norm of `|df_a|`; trials run in parallel and are merged in
/// `(N, trial)` order.
pub fn prop31_experiment(config: &Prop31Config) -> Result<Prop31Report> {
    if config.trials == 0 || config.dims.is_empty() || config.dims.contains(&0) {
        return Err(Error::InvalidInput("need trials >= 1 and dimensions >= 1".into()));
    }
    let constant = CurveFamily::lattice_family(
        config.lattice.clone(),
        config.amplitude,
        1,
        CoefficientPattern::Constant {
            values: vec![Complex64::new(config.amplitude, 0.0)],
        },
    )?;
    let constant_baseline = lattice_family_sup(&constant, config.tol)?.sup_estimate;

    let mut dims = vec![1];
    dims.extend(config.dims.iter().copied().filter(|&n| n != 1));
    let jobs: Vec<(usize, usize)> = dims
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .collect();
    let all: Vec<TrialRow> = jobs
        .par_iter()
        .map(|&(n, trial)| {
            let seed = trial_seed(config.seed, n, trial);
            let curve = CurveFamily::lattice_family(
                config.lattice.clone(),
                config.amplitude,
                n,
                CoefficientPattern::Random {
                    seed,
                    period: config.period,
                },
            )?;
            let report = lattice_family_sup(&curve, config.tol)?;
            let rescaled = brody_rescale(&curve, report.sup_estimate)?;
            let after = lattice_family_sup(&rescaled, config.tol)?;
            Ok(TrialRow {
                n,
                trial,
                seed,
                sup: report.sup_estimate,
                converged: report.converged && after.converged,
                rescaled_sup: after.sup_estimate,
            })
        })
        .collect::<Result<_>>()?;

    let baseline = all
        .iter()
        .filter(|r| r.n == 1)
        .map(|r| r.sup)
        .fold(0.0, f64::max);
    let rows: Vec<TrialRow> = all
        .into_iter()
        .filter(|r| config.dims.contains(&r.n))
        .collect();
    let mut order: Vec<usize> = config.dims.clone();
    order.sort_unstable();
    order.dedup();
    let summaries: Vec<DimSummary> = order
        .iter()
        .map(|&n| {
            let sel: Vec<&TrialRow> = rows.iter().filter(|r| r.n == n).collect();
            DimSummary {
                n,
                max_sup: sel.iter().map(|r| r.sup).fold(0.0, f64::max),
                mean_sup: sel.iter().map(|r| r.sup).sum::<f64>() / sel.len() as f64,
                all_converged: sel.iter().all(|r| r.converged),
                max_rescaled_sup: sel.iter().map(|r| r.rescaled_sup).fold(0.0, f64::max),
            }
        })
        .collect();
    let overall_max = summaries.iter().map(|s| s.max_sup).fold(0.0, f64::max);
    let mut rows = rows;
    rows.sort_by_key(|r| (r.n, r.trial));
    Ok(Prop31Report {
        config: config.clone(),
        constant_baseline,
        baseline,
        overall_max,
        band_ok: overall_max <= config.band_factor * baseline,
        summaries,
        rows,
    })
}

/// Lower bound `2N / covolume` and upper bound `4 e N` on the mean
/// dimension of the space of Brody curves in `CP^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    #[serde(rename = "N")]
    pub n: u32,
    pub e_value: f64,
    pub covolume: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `lower_bound <= upper_bound`.
    pub consistent: bool,
}

pub fn bounds_report(n: u32, e_value: f64, covolume: f64) -> Result<BoundsReport> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&e_value) {
        return Err(Error::InvalidInput(format!("mean energy {e_value} must lie in [0, 1]")));
    }
    if !(covolume > 0.0) || !covolume.is_finite() {
        return Err(Error::InvalidInput(format!("covolume {covolume} must be positive")));
    }
    let lower_bound = 2.0 * n as f64 / covolume;
    let upper_bound = 4.0 * e_value * n as f64;
    Ok(BoundsReport {
        n,
        e_value,
        covolume,
        lower_bound,
        upper_bound,
        consistent: lower_bound <= upper_bound,
    })
}
