//! Rank-two lattices in the plane: reduction, enumeration, nearest points and
//! rigorous bounds for the tails of `sum |lambda|^{-s}`.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generators as given by the user. This is the serialized form of a
/// [`Lattice`]; everything else is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub omega1: Complex64,
    pub omega2: Complex64,
}

/// A lattice `Z omega1 + Z omega2` in `C`.
///
/// `delta` is half the length of the shortest nonzero vector, so that any two
/// distinct lattice points are at least `2 delta` apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeSpec", into = "LatticeSpec")]
pub struct Lattice {
    omega1: Complex64,
    omega2: Complex64,
    covolume: f64,
    delta: f64,
    covering_radius: f64,
    /// Lagrange-reduced basis with `Im(b2 / b1) > 0`.
    reduced: [Complex64; 2],
    /// Rows express the reduced vectors in the user basis.
    transform: [[i64; 2]; 2],
}

/// A lattice point together with its coordinates in the user basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub i: i64,
    pub j: i64,
    pub z: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub point: LatticePoint,
    pub distance: f64,
    /// Another lattice point is equidistant up to rounding.
    pub ambiguous: bool,
}

impl TryFrom<LatticeSpec> for Lattice {
    type Error = Error;
    fn try_from(s: LatticeSpec) -> Result<Self> {
        Lattice::new(s.omega1, s.omega2)
    }
}

impl From<Lattice> for LatticeSpec {
    fn from(l: Lattice) -> Self {
        LatticeSpec {
            omega1: l.omega1,
            omega2: l.omega2,
        }
    }
}

impl Lattice {
    pub fn new(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        let covolume = (omega1.conj() * omega2).im.abs();
        let scale = omega1.norm_sqr().max(omega2.norm_sqr());
        if !covolume.is_finite() || covolume <= 1e-12 * scale || scale == 0.0 {
            return Err(Error::DegenerateLattice);
        }

        let mut b = [omega1, omega2];
        let mut u = [[1i64, 0], [0, 1]];
        for _ in 0..200 {
            if b[0].norm_sqr() > b[1].norm_sqr() {
                b.swap(0, 1);
                u.swap(0, 1);
            }
            let mu = ((b[1] * b[0].conj()).re / b[0].norm_sqr()).round();
            if mu == 0.0 {
                break;
            }
            b[1] -= b[0] * mu;
            let m = mu as i64;
            u[1][0] -= m * u[0][0];
            u[1][1] -= m * u[0][1];
        }
        if (b[0].conj() * b[1]).im < 0.0 {
            b[1] = -b[1];
            u[1] = [-u[1][0], -u[1][1]];
        }

        let shortest = b[0].norm();
        let third = (b[0] - b[1]).norm().min((b[0] + b[1]).norm());
        let covering_radius = b[0].norm() * b[1].norm() * third / (2.0 * covolume);

        Ok(Self {
            omega1,
            omega2,
            covolume,
            delta: shortest / 2.0,
            covering_radius,
            reduced: b,
            transform: u,
        })
    }

    /// The Gaussian integers `Z + iZ`.
    pub fn square() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).expect("square lattice")
    }

    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    /// Area of a fundamental domain, `|C / Lambda|`.
    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn shortest_vector(&self) -> f64 {
        2.0 * self.delta
    }

    /// Radius of the Voronoi cell, i.e. `sup_z d(z, Lambda)`.
    pub fn covering_radius(&self) -> f64 {
        self.covering_radius
    }

    pub fn reduced_basis(&self) -> [Complex64; 2] {
        self.reduced
    }

    /// Length of the longer reduced generator.
    pub fn longest_reduced(&self) -> f64 {
        self.reduced[1].norm()
    }

    pub fn point(&self, i: i64, j: i64) -> Complex64 {
        self.omega1 * i as f64 + self.omega2 * j as f64
    }

    /// The lattice `m Lambda` with generators `m omega1, m omega2`.
    pub fn scaled(&self, m: f64) -> Result<Self> {
        Self::new(self.omega1 * m, self.omega2 * m)
    }

    fn reduced_coords(&self, z: Complex64) -> (f64, f64) {
        let [b1, b2] = self.reduced;
        let b = (b1.conj() * z).im / self.covolume;
        let a = -(b2.conj() * z).im / self.covolume;
        (a, b)
    }

    fn from_reduced(&self, a: i64, b: i64) -> LatticePoint {
        let [r1, r2] = self.transform;
        let i = a * r1[0] + b * r2[0];
        let j = a * r1[1] + b * r2[1];
        LatticePoint {
            i,
            j,
            z: self.point(i, j),
        }
    }

    /// Lattice points with `|lambda - center| <= radius`, ordered by
    /// distance to the center and then by argument in `[0, 2pi)`.
    pub fn points_near(&self, center: Complex64, radius: f64) -> Vec<LatticePoint> {
        if radius < 0.0 {
            return Vec::new();
        }
        let [b1, b2] = self.reduced;
        let (ca, cb) = self.reduced_coords(center);
        let ra = (radius * b2.norm() / self.covolume).ceil() as i64 + 1;
        let rb = (radius * b1.norm() / self.covolume).ceil() as i64 + 1;
        let (a0, b0) = (ca.round() as i64, cb.round() as i64);
        let r2 = radius * radius;
        let mut out = Vec::new();
        for a in (a0 - ra)..=(a0 + ra) {
            for b in (b0 - rb)..=(b0 + rb) {
                let p = self.from_reduced(a, b);
                if (p.z - center).norm_sqr() <= r2 {
                    out.push(p);
                }
            }
        }
        out.sort_by(|p, q| order_key(p.z - center, q.z - center));
        out
    }

    /// Lattice points in the closed disk of radius `radius` about the origin.
    pub fn points_in_disk(&self, radius: f64) -> Vec<LatticePoint> {
        self.points_near(Complex64::new(0.0, 0.0), radius)
    }

    /// Nearest lattice point, ties broken towards smaller `|lambda|` and then
    /// smaller argument.
    pub fn nearest(&self, z: Complex64) -> Nearest {
        let (ca, cb) = self.reduced_coords(z);
        let (a0, b0) = (ca.round() as i64, cb.round() as i64);
        let mut cands: Vec<(f64, LatticePoint)> = Vec::with_capacity(9);
        for a in (a0 - 1)..=(a0 + 1) {
            for b in (b0 - 1)..=(b0 + 1) {
                let p = self.from_reduced(a, b);
                cands.push(((p.z - z).norm(), p));
            }
        }
        let tie = 1e-12 * (1.0 + z.norm());
        cands.sort_by(|x, y| {
            if (x.0 - y.0).abs() <= tie {
                order_key(x.1.z, y.1.z)
            } else {
                x.0.total_cmp(&y.0)
            }
        });
        Nearest {
            point: cands[0].1,
            distance: cands[0].0,
            ambiguous: (cands[1].0 - cands[0].0).abs() <= tie,
        }
    }

    pub fn distance_to_lattice(&self, z: Complex64) -> f64 {
        self.nearest(z).distance
    }

    /// Upper bound on `sum_{|lambda| > radius} |lambda|^{-s}`.
    ///
    /// Writing the tail as a Stieltjes integral against the counting function
    /// `n(rho)` and integrating by parts gives
    /// `-radius^{-s} n(radius) + s int_radius^inf n(rho) rho^{-s-1} d rho`;
    /// the integral is bounded with `n(rho) <= pi (rho + r0)^2 / covolume`
    /// where `r0` is the covering radius (Voronoi cells of the counted points
    /// are disjoint and lie in the disk of radius `rho + r0`). The boundary
    /// term uses the exact count. The result is nonincreasing in `radius`.
    pub fn lattice_sum_tail_bound(&self, s: f64, radius: f64) -> Result<f64> {
        if radius < 2.0 * self.longest_reduced() {
            return Err(Error::InvalidInput(format!(
                "tail radius {radius} is below twice the longest generator {}",
                self.longest_reduced()
            )));
        }
        self.shifted_tail_bound(s, radius, 0.0)
    }

    /// Upper bound on `sum_{|mu| > radius} (|mu| - shift)^{-s}`, for
    /// `radius > shift >= 0`. With `shift = |w|` this bounds the tail of
    /// `sum |w - mu|^{-s}`.
    pub fn shifted_tail_bound(&self, s: f64, radius: f64, shift: f64) -> Result<f64> {
        if s <= 2.0 {
            return Err(Error::DivergentSum(s));
        }
        if radius <= shift || shift < 0.0 {
            return Err(Error::InvalidInput(format!(
                "tail radius {radius} must exceed the shift {shift}"
            )));
        }
        let count = self.points_in_disk(radius).len() as f64;
        let x = radius - shift;
        let a = shift + self.covering_radius;
        let integral =
            x.powf(2.0 - s) / (s - 2.0) + 2.0 * a * x.powf(1.0 - s) / (s - 1.0) + a * a * x.powf(-s) / s;
        let bound = s * PI / self.covolume * integral - count * x.powf(-s);
        Ok(bound.max(0.0))
    }

    /// Bound on `sum_{lambda != lambda_0} |z - lambda|^{-s}` uniformly over
    /// `|z - lambda_0| < delta`, the constant called `c_2` in the cubic-pole
    /// estimates.
    pub fn punctured_sum_constant(&self, s: f64) -> Result<f64> {
        let radius = (4.0 * self.longest_reduced()).max(20.0 * self.delta);
        let direct: f64 = self
            .points_in_disk(radius)
            .iter()
            .skip(1)
            .map(|p| (p.z.norm() - self.delta).powf(-s))
            .sum();
        Ok(direct + self.shifted_tail_bound(s, radius, self.delta)?)
    }

    /// Bound on `sum_lambda |z - lambda|^{-s}` uniformly over
    /// `d(z, Lambda) >= d`, the constant called `c_1`.
    pub fn away_sum_constant(&self, s: f64, d: f64) -> Result<f64> {
        if d <= 0.0 || d > self.delta {
            return Err(Error::InvalidInput(format!(
                "distance {d} must lie in (0, delta = {}]",
                self.delta
            )));
        }
        let r0 = self.covering_radius;
        let radius = (4.0 * self.longest_reduced()).max(20.0 * self.delta) + r0;
        let direct: f64 = self
            .points_in_disk(radius)
            .iter()
            .skip(1)
            .map(|p| d.max(p.z.norm() - r0).powf(-s))
            .sum();
        Ok(d.powf(-s) + direct + self.shifted_tail_bound(s, radius, r0)?)
    }

    /// Radius of the disk around each lattice point on which the cubic-pole
    /// chart satisfies `|g_n| >= A / (2 sqrt N)`:
    /// `min(delta, (4 c_2(Lambda, 3))^{-1/3})`.
    pub fn chart_radius(&self) -> Result<f64> {
        let c2 = self.punctured_sum_constant(3.0)?;
        Ok(self.delta.min((4.0 * c2).powf(-1.0 / 3.0)))
    }
}

fn order_key(a: Complex64, b: Complex64) -> Ordering {
    let arg = |z: Complex64| {
        let t = z.im.atan2(z.re);
        if t < 0.0 {
            t + TAU
        } else {
            t
        }
    };
    a.norm_sqr()
        .total_cmp(&b.norm_sqr())
        .then_with(|| arg(a).total_cmp(&arg(b)))
}

/// Free-function form of [`Lattice::points_in_disk`].
pub fn lattice_points_in_disk(lat: &Lattice, radius: f64) -> Vec<Complex64> {
    lat.points_in_disk(radius).into_iter().map(|p| p.z).collect()
}

/// Free-function form of [`Lattice::lattice_sum_tail_bound`].
pub fn lattice_sum_tail_bound(lat: &Lattice, s: f64, radius: f64) -> Result<f64> {
    lat.lattice_sum_tail_bound(s, radius)
}
