//! Shift spaces `([0, 1]^N)^{Z^k}` with the weighted metric
//! `d(x, y) = sum_a 2^{-|a|} d(x_a, y_a)` and their Widim growth bounds.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::cover::{min_order_box_cover_with, GridCube, DEFAULT_NODE_GUARD};
use crate::error::{Error, Result};

/// The shift of `Z^k` on `([0, 1]^N)^{Z^k}`, with base metric `scale * d_inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftSystem {
    pub base_dim: usize,
    pub rank: usize,
    pub scale: f64,
}

impl ShiftSystem {
    pub fn new(base_dim: usize, rank: usize) -> Result<Self> {
        Self::with_scale(base_dim, rank, 1.0)
    }

    pub fn with_scale(base_dim: usize, rank: usize, scale: f64) -> Result<Self> {
        if base_dim == 0 || rank == 0 {
            return Err(Error::InvalidInput("shift needs N >= 1 and k >= 1".into()));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidInput(format!("base scale {scale} must be positive")));
        }
        Ok(Self {
            base_dim,
            rank,
            scale,
        })
    }

    /// Diameter of the alphabet cube.
    pub fn base_diameter(&self) -> f64 {
        self.scale
    }

    fn base_distance(&self, p: &[f64], q: &[f64]) -> f64 {
        self.scale * p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Number of `a` in `Z^k` with `|a|_1 = j`.
    pub fn shell_size(&self, j: u32) -> f64 {
        if j == 0 {
            return 1.0;
        }
        let k = self.rank as u32;
        (1..=k.min(j))
            .map(|i| 2f64.powi(i as i32) * binomial(k, i) * binomial(j - 1, i - 1))
            .sum()
    }

    /// `diam * sum_{|a| >= s} 2^{-|a|}`, the largest contribution of the
    /// coordinates at distance at least `s`.
    pub fn tail_constant(&self, s: u32) -> f64 {
        let mut sum = 0.0;
        let mut j = s;
        loop {
            let term = self.shell_size(j) * 0.5f64.powi(j as i32);
            sum += term;
            if j > s + 2 * self.rank as u32 + 8 && term < 1e-18 * sum {
                break;
            }
            j += 1;
        }
        self.base_diameter() * sum
    }

    /// Smallest `s` with `tail_constant(s) < eps`.
    pub fn tail_cutoff(&self, eps: f64) -> Result<u32> {
        if !(eps > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon {eps} must be positive")));
        }
        (0..2000)
            .find(|&s| self.tail_constant(s) < eps)
            .ok_or_else(|| Error::InvalidInput(format!("epsilon {eps} is too small")))
    }
}

fn binomial(n: u32, r: u32) -> f64 {
    if r > n {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// A point of the shift space that is `0` outside finitely many sites.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FiniteConfig {
    pub sites: BTreeMap<Vec<i64>, Vec<f64>>,
}

impl FiniteConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, site: Vec<i64>, value: Vec<f64>) -> Self {
        self.sites.insert(site, value);
        self
    }

    /// `(g.x)_a = x_{a + g}`.
    pub fn shifted(&self, g: &[i64]) -> Self {
        let sites = self
            .sites
            .iter()
            .map(|(a, v)| (a.iter().zip(g).map(|(ai, gi)| ai - gi).collect(), v.clone()))
            .collect();
        Self { sites }
    }
}

fn check_config(sys: &ShiftSystem, x: &FiniteConfig) -> Result<()> {
    for (a, v) in &x.sites {
        if a.len() != sys.rank {
            return Err(Error::DimensionMismatch {
                expected: sys.rank,
                got: a.len(),
            });
        }
        if v.len() != sys.base_dim {
            return Err(Error::DimensionMismatch {
                expected: sys.base_dim,
                got: v.len(),
            });
        }
    }
    Ok(())
}

/// `max_{g in window} d(g.x, g.y)`, summed exactly over the union of the
/// supports.
pub fn dynamical_distance(
    sys: &ShiftSystem,
    x: &FiniteConfig,
    y: &FiniteConfig,
    window: &[Vec<i64>],
) -> Result<f64> {
    check_config(sys, x)?;
    check_config(sys, y)?;
    if let Some(g) = window.iter().find(|g| g.len() != sys.rank) {
        return Err(Error::DimensionMismatch {
            expected: sys.rank,
            got: g.len(),
        });
    }
    let zero = vec![0.0; sys.base_dim];
    let support: BTreeSet<&Vec<i64>> = x.sites.keys().chain(y.sites.keys()).collect();
    let diffs: Vec<(&Vec<i64>, f64)> = support
        .into_iter()
        .map(|a| {
            let p = x.sites.get(a).unwrap_or(&zero);
            let q = y.sites.get(a).unwrap_or(&zero);
            (a, sys.base_distance(p, q))
        })
        .collect();
    let mut best = 0.0f64;
    for g in window {
        let d: f64 = diffs
            .iter()
            .map(|(a, d)| {
                let norm: i64 = a.iter().zip(g).map(|(ai, gi)| (ai - gi).abs()).sum();
                d * 0.5f64.powi(norm.min(i32::MAX as i64) as i32)
            })
            .sum();
        best = best.max(d);
    }
    Ok(best)
}

/// The window `[0, n)^k`.
pub fn box_window(rank: usize, n: u32) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        let prev = std::mem::take(&mut out);
        for g in prev {
            for i in 0..n as i64 {
                let mut h = g.clone();
                h.push(i);
                out.push(h);
            }
        }
    }
    out
}

/// One row of a growth scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: u32,
    pub lower: f64,
    pub upper: f64,
    pub lower_rate: f64,
    pub upper_rate: f64,
    pub s: u32,
    /// Minimum grid-box cover order of the embedded cube, when computed.
    pub cross_check: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthScan {
    pub system: ShiftSystem,
    pub epsilon: f64,
    pub s: u32,
    pub tail: f64,
    /// False when `eps >= 1`; the lower bounds are then reported as 0.
    pub lower_bound_applies: bool,
    pub rows: Vec<GrowthRow>,
}

/// Largest embedded cube dimension for which the cover search is attempted.
pub const CROSS_CHECK_MAX_DIM: usize = 2;

/// Bounds `N n^k <= Widim_eps <= N (n + 2s - 1)^k` over the windows
/// `[0, n)^k`, with `s` the tail cutoff for `eps`.
///
/// With `cross_check` set, rows whose embedded cube `[0, 1]^{N n^k}` has
/// dimension at most [`CROSS_CHECK_MAX_DIM`] also carry the exact minimum
/// grid-box cover order (grid `1/2`, half-step box grid).
pub fn widim_growth_scan(
    sys: &ShiftSystem,
    eps: f64,
    n_range: &[u32],
    cross_check: bool,
) -> Result<GrowthScan> {
    let s = sys.tail_cutoff(eps)?;
    let applies = eps < 1.0;
    let k = sys.rank as i32;
    let nb = sys.base_dim as f64;
    let mut rows = Vec::with_capacity(n_range.len());
    for &n in n_range {
        if n == 0 {
            return Err(Error::InvalidInput("window size must be at least 1".into()));
        }
        let nk = (n as f64).powi(k);
        let lower = if applies { nb * nk } else { 0.0 };
        let upper = nb * ((n + 2 * s) as f64 - 1.0).powi(k);
        let cube_dim = sys.base_dim * (n as usize).pow(k as u32);
        let cross = if cross_check && applies && cube_dim <= CROSS_CHECK_MAX_DIM {
            let cube = GridCube::new(cube_dim, 2)?;
            Some(min_order_box_cover_with(&cube, eps / sys.scale, 2, DEFAULT_NODE_GUARD)?.order)
        } else {
            None
        };
        rows.push(GrowthRow {
            n,
            lower,
            upper,
            lower_rate: lower / nk,
            upper_rate: upper / nk,
            s,
            cross_check: cross,
        });
    }
    Ok(GrowthScan {
        system: *sys,
        epsilon: eps,
        s,
        tail: sys.tail_constant(s),
        lower_bound_applies: applies,
        rows,
    })
}

/// Mean dimension with respect to `R^k` from the rate per lattice site.
pub fn mean_dim_normalize(rate_per_lattice: f64, covolume: f64) -> f64 {
    rate_per_lattice / covolume
}
