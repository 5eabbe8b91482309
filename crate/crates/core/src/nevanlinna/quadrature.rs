//! Polar quadrature of the energy density.
//!
//! Ring integrals `m(rho) = int_0^{2 pi} |df|^2(rho e^{i theta}) rho d theta`
//! use the trapezoid rule (spectrally accurate for periodic analytic
//! integrands), doubled until the relative change drops below the ring
//! tolerance. Radial integrals use Gauss–Legendre panels whose breakpoints
//! include every requested radius and, for pole-bearing curves, the radii of
//! nearby poles.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::curves::{CurveFamily, FeatureScale};
use crate::error::{Error, Result};

/// Gauss–Legendre order used on each radial panel.
pub const PANEL_ORDER: usize = 12;
const MAX_RING_POINTS: usize = 1 << 22;
const GEOMETRIC_RATIO: f64 = 1.5;

/// Nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let step = p1 / dp;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// Starting number of trapezoid points on the circle of radius `rho`.
fn ring_start(features: &FeatureScale, rho: f64) -> usize {
    let n = match *features {
        FeatureScale::Zero => 1.0,
        FeatureScale::Localized { scale, radius } => TAU * rho.min(2.0 * radius) * 4.0 / scale,
        FeatureScale::Planar { scale } => TAU * rho * 4.0 / scale,
    };
    (n.ceil() as usize).max(64)
}

/// `int_0^{2 pi} |df|^2(rho e^{i theta}) rho d theta` to relative accuracy
/// `tol`.
pub fn ring_integral(curve: &CurveFamily, rho: f64, tol: f64) -> Result<f64> {
    let features = curve.feature_scale();
    ring_integral_with(curve, &features, rho, tol)
}

fn ring_integral_with(curve: &CurveFamily, features: &FeatureScale, rho: f64, tol: f64) -> Result<f64> {
    if matches!(features, FeatureScale::Zero) || rho == 0.0 {
        return Ok(0.0);
    }
    let eval = |k: usize, m: usize| -> Result<f64> {
        let theta = TAU * k as f64 / m as f64;
        curve.energy_density(Complex64::from_polar(rho, theta))
    };
    let mut m = ring_start(features, rho);
    let mut sum = 0.0;
    for k in 0..m {
        sum += eval(k, m)?;
    }
    let mut estimate = sum * TAU * rho / m as f64;
    // accidental agreement of two coarse sums is ruled out by also asking
    // the previous doubling to be in the exponentially convergent regime
    let mut previous_change = f64::INFINITY;
    let settled = tol.sqrt().max(tol);
    loop {
        let mut extra = 0.0;
        for k in 0..m {
            extra += eval(2 * k + 1, 2 * m)?;
        }
        sum += extra;
        m *= 2;
        let next = sum * TAU * rho / m as f64;
        let change = (next - estimate).abs();
        if change <= tol * next.abs() && previous_change <= settled * next.abs() {
            return Ok(next);
        }
        if m >= MAX_RING_POINTS {
            return Err(Error::QuadratureFailure {
                last_estimate: next,
                last_change: change,
            });
        }
        previous_change = change;
        estimate = next;
    }
}

/// Radial panel breakpoints covering `[0, top]`, containing every entry of
/// `mandatory`.
pub fn breakpoints(curve: &CurveFamily, top: f64, mandatory: &[f64]) -> Vec<f64> {
    let features = curve.feature_scale();
    let mut fixed: Vec<f64> = mandatory.iter().copied().filter(|&r| r > 0.0 && r <= top).collect();
    fixed.push(0.0);
    fixed.push(top);
    let width = match features {
        FeatureScale::Zero => top,
        FeatureScale::Localized { scale, radius } => {
            if 2.0 * radius < top {
                fixed.push(2.0 * radius);
            }
            scale
        }
        FeatureScale::Planar { scale } => scale,
    };
    fixed.sort_by(f64::total_cmp);
    fixed.dedup();

    // pole radii, merged with each other and kept clear of the fixed points
    let gap = width / 4.0;
    let mut points = fixed.clone();
    let mut last = f64::NEG_INFINITY;
    for r in curve.pole_radii(top) {
        if r - last < gap {
            continue;
        }
        let i = fixed.partition_point(|&f| f < r);
        let near_fixed = (i < fixed.len() && fixed[i] - r < gap) || (i > 0 && r - fixed[i - 1] < gap);
        if !near_fixed {
            points.push(r);
            last = r;
        }
    }
    points.sort_by(f64::total_cmp);

    let geometric_from = match features {
        FeatureScale::Localized { radius, .. } => 2.0 * radius,
        _ => f64::INFINITY,
    };
    let mut out = vec![points[0]];
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = if a >= geometric_from {
            ((b / a).ln() / GEOMETRIC_RATIO.ln()).ceil().max(1.0) as usize
        } else {
            ((b - a) / width).ceil().max(1.0) as usize
        };
        for k in 1..pieces {
            let t = k as f64 / pieces as f64;
            out.push(if a >= geometric_from {
                a * (b / a).powf(t)
            } else {
                a + (b - a) * t
            });
        }
        out.push(b);
    }
    out
}

/// Per-panel integrals of `m(rho)` and `m(rho) log(max(rho, 1))` with each
/// panel of `edges` split into `2^level` equal pieces.
pub(crate) fn panel_integrals(
    curve: &CurveFamily,
    edges: &[f64],
    level: u32,
    ring_tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let features = curve.feature_scale();
    if matches!(features, FeatureScale::Zero) {
        let n = edges.len() - 1;
        return Ok((vec![0.0; n], vec![0.0; n]));
    }
    let (x, w) = panel_rule();
    let split = 1usize << level;
    // all nodes in a deterministic order
    let mut nodes = Vec::new();
    for e in edges.windows(2) {
        let (a, b) = (e[0], e[1]);
        for s in 0..split {
            let lo = a + (b - a) * s as f64 / split as f64;
            let hi = a + (b - a) * (s + 1) as f64 / split as f64;
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(w) {
                nodes.push((mid + half * xi, half * wi));
            }
        }
    }
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&(rho, _)| ring_integral_with(curve, &features, rho, ring_tol))
        .collect::<Result<_>>()?;
    let per_panel = split * PANEL_ORDER;
    let mut energy = Vec::with_capacity(edges.len() - 1);
    let mut weighted = Vec::with_capacity(edges.len() - 1);
    for (chunk_nodes, chunk_vals) in nodes.chunks(per_panel).zip(values.chunks(per_panel)) {
        let mut e = 0.0;
        let mut l = 0.0;
        for (&(rho, wt), &m) in chunk_nodes.iter().zip(chunk_vals) {
            e += wt * m;
            l += wt * m * rho.max(1.0).ln();
        }
        energy.push(e);
        weighted.push(l);
    }
    Ok((energy, weighted))
}
