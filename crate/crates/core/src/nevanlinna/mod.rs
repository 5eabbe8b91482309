//! Energy integrals of holomorphic curves: disk energy, the Shimizu–Ahlfors
//! characteristic
//!
//! ```text
//! T(r, f) = int_1^r dt/t int_{|z| <= t} |df|^2 dx dy,
//! ```
//!
//! finite-radius estimators for the mean energy `limsup 2 T(r) / (pi r^2)`
//! and the packing density `limsup (pi r^2)^{-1} int_{|z|<=r} |df|^2`, and
//! integrated counting functions of pole divisors.
//!
//! All integrals of one curve come from a single radial pass: with
//! `m(rho)` the ring integral and `E(t) = int_0^t m`, integration by parts
//! gives `T(r) = E(r) log r - int_1^r m(rho) log rho d rho`.

pub mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curves::{CurveFamily, Lattice};
use crate::error::{Error, Result};

pub use quadrature::{breakpoints, gauss_legendre, ring_integral};

/// Default relative tolerance of disk-energy quadrature.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Maximum number of radial panel doublings.
pub const MAX_REFINEMENTS: u32 = 6;
/// Number of geometric sample radii in the limsup window.
pub const WINDOW_SAMPLES: usize = 16;

/// Disk energy and characteristic function on a set of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfile {
    pub radii: Vec<f64>,
    pub disk_energy: Vec<f64>,
    pub characteristic: Vec<f64>,
    pub mean_energy_running: Vec<f64>,
    pub packing_running: Vec<f64>,
    pub quadrature_error: Vec<f64>,
}

/// One CSV row of an [`EnergyProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub r: f64,
    pub disk_energy: f64,
    #[serde(rename = "T")]
    pub characteristic: f64,
    pub mean_running: f64,
    pub packing_running: f64,
    pub err: f64,
}

impl EnergyProfile {
    /// Profile on `radii` (increasing, each `>= 1`) with relative tolerance
    /// `tol`.
    pub fn compute(curve: &CurveFamily, radii: &[f64], tol: f64) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidInput("profile needs at least one radius".into()));
        }
        if radii.iter().any(|&r| !(r >= 1.0) || !r.is_finite()) {
            return Err(Error::InvalidInput("profile radii must be finite and >= 1".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("profile radii must be strictly increasing".into()));
        }
        let (energy, t, err) = integrate(curve, radii, tol)?;
        let area: Vec<f64> = radii.iter().map(|r| std::f64::consts::PI * r * r).collect();
        Ok(Self {
            radii: radii.to_vec(),
            mean_energy_running: t.iter().zip(&area).map(|(t, a)| 2.0 * t / a).collect(),
            packing_running: energy.iter().zip(&area).map(|(e, a)| e / a).collect(),
            disk_energy: energy,
            characteristic: t,
            quadrature_error: err,
        })
    }

    pub fn rows(&self) -> Vec<ProfileRow> {
        (0..self.radii.len())
            .map(|i| ProfileRow {
                r: self.radii[i],
                disk_energy: self.disk_energy[i],
                characteristic: self.characteristic[i],
                mean_running: self.mean_energy_running[i],
                packing_running: self.packing_running[i],
                err: self.quadrature_error[i],
            })
            .collect()
    }
}

/// Disk energies `E(t)`, characteristics `T(t)` (zero for `t < 1`) and error
/// estimates on increasing positive radii.
fn integrate(curve: &CurveFamily, radii: &[f64], tol: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    let top = *radii.last().unwrap();
    let mut mandatory = radii.to_vec();
    if top > 1.0 {
        mandatory.push(1.0);
    }
    let edges = breakpoints(curve, top, &mandatory);
    // trapezoid convergence is exponential, so a ring accepted at change
    // `tol` is far more accurate than `tol`
    let ring_tol = tol;
    let eval = |level: u32| -> Result<(Vec<f64>, Vec<f64>)> {
        let (energy, weighted) = quadrature::panel_integrals(curve, &edges, level, ring_tol)?;
        let mut e_out = Vec::with_capacity(radii.len());
        let mut t_out = Vec::with_capacity(radii.len());
        let (mut e_acc, mut l_acc) = (0.0, 0.0);
        let mut k = 0;
        for (i, edge) in edges.iter().enumerate().skip(1) {
            e_acc += energy[i - 1];
            l_acc += weighted[i - 1];
            while k < radii.len() && radii[k] == *edge {
                let r = radii[k];
                e_out.push(e_acc);
                t_out.push(if r > 1.0 { e_acc * r.ln() - l_acc } else { 0.0 });
                k += 1;
            }
        }
        debug_assert_eq!(k, radii.len());
        Ok((e_out, t_out))
    };
    let (mut e_prev, mut t_prev) = eval(0)?;
    let mut last_change = f64::INFINITY;
    for level in 1..=MAX_REFINEMENTS {
        let (e, t) = eval(level)?;
        let mut ok = true;
        let mut worst = 0.0f64;
        let err: Vec<f64> = (0..radii.len())
            .map(|i| {
                let de = (e[i] - e_prev[i]).abs();
                let dt = (t[i] - t_prev[i]).abs();
                let scale = e[i].abs().max(t[i].abs());
                if de.max(dt) > tol * scale {
                    ok = false;
                }
                worst = worst.max(de.max(dt) / scale.max(f64::MIN_POSITIVE));
                de.max(dt)
            })
            .collect();
        if ok {
            return Ok((e, t, err));
        }
        last_change = worst;
        e_prev = e;
        t_prev = t;
    }
    Err(Error::QuadratureFailure {
        last_estimate: *e_prev.last().unwrap(),
        last_change,
    })
}

/// `int_{|z| <= t} |df|^2 dx dy` and an error estimate.
pub fn area_energy(curve: &CurveFamily, t: f64, tol: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("radius {t} must be positive")));
    }
    let (e, _, err) = integrate(curve, &[t], tol)?;
    Ok((e[0], err[0]))
}

/// `T(r, f)` and an error estimate.
pub fn characteristic_with_error(curve: &CurveFamily, r: f64, tol: f64) -> Result<(f64, f64)> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("radius {r} must be >= 1")));
    }
    if r == 1.0 {
        return Ok((0.0, 0.0));
    }
    let (_, t, err) = integrate(curve, &[r], tol)?;
    Ok((t[0], err[0]))
}

/// `T(r, f)`.
pub fn characteristic(curve: &CurveFamily, r: f64, tol: f64) -> Result<f64> {
    Ok(characteristic_with_error(curve, r, tol)?.0)
}

/// Finite-radius report for a limsup quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimsupEstimate {
    /// Maximum of the running quantity over the window.
    pub estimate: f64,
    pub window_max: f64,
    /// Least-squares slope of the running quantity against `1/r` over the
    /// window.
    pub trend_slope: f64,
    pub window: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl LimsupEstimate {
    fn from_samples(window: Vec<f64>, values: Vec<f64>, errors: Vec<f64>) -> Self {
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let x: Vec<f64> = window.iter().map(|r| 1.0 / r).collect();
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = values.iter().sum::<f64>() / n;
        let sxy: f64 = x.iter().zip(&values).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        Self {
            estimate: max,
            window_max: max,
            trend_slope: if sxx > 0.0 { sxy / sxx } else { 0.0 },
            window,
            values,
            errors,
        }
    }
}

/// `WINDOW_SAMPLES` geometric radii spanning `[r_max / 2, r_max]`.
pub fn window_radii(r_max: f64) -> Vec<f64> {
    (0..WINDOW_SAMPLES)
        .map(|i| {
            if i + 1 == WINDOW_SAMPLES {
                r_max
            } else {
                0.5 * r_max * 2f64.powf(i as f64 / (WINDOW_SAMPLES - 1) as f64)
            }
        })
        .collect()
}

/// Mean-energy and packing-density estimates from one profile over the
/// window `[r_max / 2, r_max]`.
pub fn limsup_estimates(curve: &CurveFamily, r_max: f64, tol: f64) -> Result<(LimsupEstimate, LimsupEstimate)> {
    if !(r_max >= 4.0) || !r_max.is_finite() {
        return Err(Error::InvalidInput(format!("r_max {r_max} must be >= 4")));
    }
    let profile = EnergyProfile::compute(curve, &window_radii(r_max), tol)?;
    estimates_from_profile(&profile, r_max)
}

/// Window estimates read off a profile that contains every radius of
/// [`window_radii`]`(r_max)`.
pub fn estimates_from_profile(profile: &EnergyProfile, r_max: f64) -> Result<(LimsupEstimate, LimsupEstimate)> {
    if !(r_max >= 4.0) || !r_max.is_finite() {
        return Err(Error::InvalidInput(format!("r_max {r_max} must be >= 4")));
    }
    let window = window_radii(r_max);
    let mut idx = Vec::with_capacity(window.len());
    for r in &window {
        let i = profile
            .radii
            .iter()
            .position(|x| (x - r).abs() <= 1e-12 * r)
            .ok_or_else(|| Error::InvalidInput(format!("profile lacks the window radius {r}")))?;
        idx.push(i);
    }
    let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let area: Vec<f64> = window.iter().map(|r| std::f64::consts::PI * r * r).collect();
    let err = pick(&profile.quadrature_error);
    let mean_err = err.iter().zip(&area).map(|(e, a)| 2.0 * e / a).collect();
    let pack_err = err.iter().zip(&area).map(|(e, a)| e / a).collect();
    Ok((
        LimsupEstimate::from_samples(window.clone(), pick(&profile.mean_energy_running), mean_err),
        LimsupEstimate::from_samples(window, pick(&profile.packing_running), pack_err),
    ))
}

pub fn mean_energy_estimate(curve: &CurveFamily, r_max: f64) -> Result<LimsupEstimate> {
    Ok(limsup_estimates(curve, r_max, DEFAULT_TOL)?.0)
}

pub fn packing_density_estimate(curve: &CurveFamily, r_max: f64) -> Result<LimsupEstimate> {
    Ok(limsup_estimates(curve, r_max, DEFAULT_TOL)?.1)
}

/// A finite divisor of poles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleDivisor {
    poles: Vec<(Complex64, u32)>,
}

impl PoleDivisor {
    pub fn new(poles: Vec<(Complex64, u32)>) -> Result<Self> {
        for (i, (a, m)) in poles.iter().enumerate() {
            if *m == 0 {
                return Err(Error::InvalidInput("pole multiplicity must be positive".into()));
            }
            if poles[..i].iter().any(|(b, _)| b == a) {
                return Err(Error::InvalidInput(format!("repeated pole location {a}")));
            }
        }
        Ok(Self { poles })
    }

    /// Every point of `lat` in the closed disk of radius `radius`, with
    /// multiplicity `multiplicity`.
    pub fn lattice(lat: &Lattice, multiplicity: u32, radius: f64) -> Result<Self> {
        Self::new(
            lat.points_in_disk(radius)
                .into_iter()
                .map(|p| (p.z, multiplicity))
                .collect(),
        )
    }

    pub fn poles(&self) -> &[(Complex64, u32)] {
        &self.poles
    }
}

/// `N(r) = sum_{0 < |a| <= r} m_a log(r / |a|) + m_0 log r`.
pub fn counting_function(poles: &PoleDivisor, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::InvalidInput(format!("radius {r} must be >= 1")));
    }
    let mut total = 0.0;
    for &(a, m) in &poles.poles {
        let d = a.norm();
        if d == 0.0 {
            total += m as f64 * r.ln();
        } else if d <= r {
            total += m as f64 * (r / d).ln();
        }
    }
    Ok(total)
}
