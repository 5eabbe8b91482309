//! Periodic lattice sums summed row by row.
//!
//! For a lattice `omega (Z + Z tau)` every row `{w - m - n tau : m in Z}`
//! has a closed form from the partial-fraction expansion of the cotangent:
//!
//! ```text
//! sum_m (u - m)^-2 = pi^2 csc^2(pi u)
//! sum_m (u - m)^-3 = pi^3 cot(pi u) csc^2(pi u)
//! sum_m (u - m)^-4 = pi^4 csc^2(pi u) (csc^2(pi u) - 2/3)
//! ```
//!
//! Away from the row containing the argument these decay like
//! `exp(-2 pi |n| Im tau)`, so a handful of rows gives full double
//! precision. The number of rows is chosen from an explicit bound on the
//! discarded rows.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::lattice::Lattice;
use crate::error::{Error, Result};

const MAX_ROWS: i64 = 64;

/// Row-summed evaluator for `sum (z - lambda)^{-k}`, `k = 3, 4`, and the
/// Weierstrass function of one lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSums {
    omega: Complex64,
    tau: Complex64,
    rows: i64,
    /// `exp(2 pi i n tau)` for `n = 1..=rows`.
    nome_powers: Vec<Complex64>,
    /// `pi^2/3 + sum_{0 < |n| <= rows} pi^2 csc^2(pi n tau)`.
    wp_constant: Complex64,
}

impl PeriodicSums {
    /// Evaluator whose discarded rows contribute at most `tol` (absolute,
    /// for each of the sums) at any argument.
    pub fn new(lattice: &Lattice, tol: f64) -> Result<Self> {
        let [b1, b2] = lattice.reduced_basis();
        let tau = b2 / b1;
        let mut rows = 1;
        let probe = Self::with_rows_raw(b1, tau, rows);
        let mut s = probe;
        while s.row_tail_bound() > tol {
            rows += 1;
            if rows > MAX_ROWS {
                return Err(Error::InvalidInput(format!(
                    "lattice sum tolerance {tol:e} needs more than {MAX_ROWS} rows"
                )));
            }
            s = Self::with_rows_raw(b1, tau, rows);
        }
        Ok(s)
    }

    /// Evaluator with a fixed number of rows on each side of the argument.
    pub fn with_rows(lattice: &Lattice, rows: i64) -> Self {
        let [b1, b2] = lattice.reduced_basis();
        Self::with_rows_raw(b1, b2 / b1, rows.clamp(0, MAX_ROWS))
    }

    fn with_rows_raw(omega: Complex64, tau: Complex64, rows: i64) -> Self {
        let mut c = Complex64::new(PI * PI / 3.0, 0.0);
        for n in 1..=rows {
            let (_, csc2) = cot_csc2(tau * n as f64);
            c += 2.0 * PI * PI * csc2;
        }
        let t = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
        let mut nome_powers = Vec::with_capacity(rows as usize);
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..rows {
            p *= t;
            nome_powers.push(p);
        }
        Self {
            omega,
            tau,
            rows,
            nome_powers,
            wp_constant: c,
        }
    }

    pub fn rows(&self) -> i64 {
        self.rows
    }

    /// Bound on the total contribution of the discarded rows to any of the
    /// three sums, in absolute units of the lattice.
    pub fn row_tail_bound(&self) -> f64 {
        let h = self.tau.im;
        let n = (self.rows + 1) as f64;
        let q = (-2.0 * PI * (n - 0.5) * h).exp();
        let ratio = (-2.0 * PI * h).exp();
        let csc2 = 4.0 * q / ((1.0 - q) * (1.0 - q));
        let cot = (1.0 + q) / (1.0 - q);
        let om = self.omega.norm();
        let t2 = PI * PI * 2.0 * csc2 / (om * om);
        let t3 = PI.powi(3) * cot * csc2 / om.powi(3);
        let t4 = PI.powi(4) * csc2 * (csc2 + 2.0 / 3.0) / om.powi(4);
        2.0 * t2.max(t3).max(t4) / (1.0 - ratio)
    }

    /// Argument in units of `omega`, reduced into the centred fundamental
    /// parallelogram.
    fn reduce(&self, z: Complex64) -> Complex64 {
        let mut w = z / self.omega;
        let n = (w.im / self.tau.im).round();
        w -= self.tau * n;
        w -= w.re.round();
        w
    }

    /// Calls `f(cot(pi u_n), csc^2(pi u_n))` for the rows `u_n = w - n tau`,
    /// `|n| <= rows` (skipping `n = 0` unless `centre`). One exponential
    /// serves all rows: for `n > 0` the stable nome is
    /// `exp(-2 pi i w) exp(2 pi i n tau)`, for `n < 0` it is
    /// `exp(2 pi i w) exp(2 pi i |n| tau)`. Needs `|Im w| < Im tau`.
    fn for_each_row(&self, w: Complex64, centre: bool, mut f: impl FnMut(Complex64, Complex64)) {
        let i = Complex64::new(0.0, 1.0);
        let q0 = (2.0 * PI * i * w).exp();
        let q0_inv = q0.inv();
        if centre {
            let (cot, csc2) = cot_csc2(w);
            f(cot, csc2);
        }
        for t in &self.nome_powers {
            // n > 0: Im u < 0
            let q = q0_inv * t;
            let d = q - 1.0;
            f(-i * (q + 1.0) / d, -4.0 * q / (d * d));
            // n < 0: Im u > 0
            let q = q0 * t;
            let d = q - 1.0;
            f(i * (q + 1.0) / d, -4.0 * q / (d * d));
        }
    }

    /// `(sum (z - lambda)^-3, sum (z - lambda)^-4)` over the whole lattice.
    pub fn cubic_quartic(&self, z: Complex64) -> (Complex64, Complex64) {
        let w = self.reduce(z);
        let (mut s3, mut s4) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        self.for_each_row(w, true, |cot, csc2| {
            s3 += cot * csc2;
            s4 += csc2 * (csc2 - 2.0 / 3.0);
        });
        let o = self.omega.inv();
        let o3 = o * o * o;
        (s3 * PI.powi(3) * o3, s4 * PI.powi(4) * o3 * o)
    }

    /// Same sums with the `lambda = 0` term removed; `v` must be the offset
    /// from the lattice point, well inside its Voronoi cell.
    pub fn punctured_cubic_quartic(&self, v: Complex64) -> (Complex64, Complex64) {
        let u = v / self.omega;
        let (mut s3, mut s4) = punctured_row(u);
        self.for_each_row(u, false, |cot, csc2| {
            s3 += PI.powi(3) * cot * csc2;
            s4 += PI.powi(4) * csc2 * (csc2 - 2.0 / 3.0);
        });
        let o = self.omega.inv();
        let o3 = o * o * o;
        (s3 * o3, s4 * o3 * o)
    }

    /// Weierstrass `(wp(z), wp'(z))`.
    pub fn wp(&self, z: Complex64) -> (Complex64, Complex64) {
        let w = self.reduce(z);
        let mut p = -self.wp_constant;
        let mut s3 = Complex64::new(0.0, 0.0);
        self.for_each_row(w, true, |cot, csc2| {
            p += PI * PI * csc2;
            s3 += cot * csc2;
        });
        let o = self.omega.inv();
        let o2 = o * o;
        (p * o2, -2.0 * s3 * PI.powi(3) * o2 * o)
    }
}

/// `(cot(pi u), csc^2(pi u))`, evaluated through `q = exp(+-2 pi i u)` so
/// that large imaginary parts neither overflow nor cancel.
fn cot_csc2(u: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let (q, sign) = if u.im >= 0.0 {
        ((2.0 * PI * i * u).exp(), 1.0)
    } else {
        ((-2.0 * PI * i * u).exp(), -1.0)
    };
    let d = q - 1.0;
    let cot = sign * i * (q + 1.0) / d;
    let csc2 = -4.0 * q / (d * d);
    (cot, csc2)
}

const SERIES_RADIUS: f64 = 0.35;

/// `sum_{m != 0} (u - m)^-3` and `(u - m)^-4`, scaled by the `pi` powers
/// already (i.e. in the same units as the other rows).
fn punctured_row(u: Complex64) -> (Complex64, Complex64) {
    if u.norm() < SERIES_RADIUS {
        let z = zeta_table();
        let u2 = u * u;
        // cubic: -sum_{j odd} C(j+2, 2) 2 zeta(j+3) u^j
        let mut s3 = Complex64::new(0.0, 0.0);
        let mut pw = u;
        let mut j = 1usize;
        while j + 3 < z.len() {
            let coef = ((j + 2) * (j + 1) / 2) as f64 * 2.0 * z[j + 3];
            let term = pw * coef;
            s3 -= term;
            if term.norm() < 1e-18 * s3.norm().max(1e-300) {
                break;
            }
            pw *= u2;
            j += 2;
        }
        // quartic: sum_{j even} C(j+3, 3) 2 zeta(j+4) u^j
        let mut s4 = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        let mut j = 0usize;
        while j + 4 < z.len() {
            let coef = ((j + 3) * (j + 2) * (j + 1) / 6) as f64 * 2.0 * z[j + 4];
            let term = pw * coef;
            s4 += term;
            if term.norm() < 1e-18 * s4.norm() {
                break;
            }
            pw *= u2;
            j += 2;
        }
        (s3, s4)
    } else {
        let (cot, csc2) = cot_csc2(u);
        let inv = u.inv();
        let inv3 = inv * inv * inv;
        (
            PI.powi(3) * cot * csc2 - inv3,
            PI.powi(4) * csc2 * (csc2 - 2.0 / 3.0) - inv3 * inv,
        )
    }
}

/// `zeta(p)` for `p = 0..=66` (entries below 2 unused), by Euler–Maclaurin
/// with 32 explicit terms.
fn zeta_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![f64::NAN; 67];
        for (p, slot) in t.iter_mut().enumerate().skip(2) {
            *slot = zeta(p as f64);
        }
        t
    })
}

pub(crate) fn zeta(p: f64) -> f64 {
    const M: f64 = 32.0;
    // sum the explicit terms smallest first
    let mut s = 0.0;
    for m in (1..32).rev() {
        s += (m as f64).powf(-p);
    }
    let tail = M.powf(1.0 - p) / (p - 1.0)
        + 0.5 * M.powf(-p)
        + p * M.powf(-p - 1.0) / 12.0
        - p * (p + 1.0) * (p + 2.0) * M.powf(-p - 3.0) / 720.0
        + p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) * M.powf(-p - 5.0) / 30240.0;
    s + tail
}
