//! Independent oracles: closed forms, brute-force sums and finite
//! differences checked against the production evaluators.

use std::f64::consts::{E, FRAC_PI_3, PI};

use meandim::brody::{brody_rescale, sup_norm_estimate, Region};
use meandim::curves::LatticeFamilySpec;
use meandim::nevanlinna::{area_energy, characteristic, counting_function, PoleDivisor};
use meandim::{
    energy_density, energy_density_fd, lattice_points_in_disk, CoefficientPattern, Complex64,
    CurveFamily, Error, ExpTerm, Lattice, LatticeFamily, ProjectiveJet, ProjectivePoint,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hexagonal() -> Lattice {
    Lattice::new(c(1.0, 0.0), Complex64::from_polar(1.0, FRAC_PI_3)).unwrap()
}

/// `Gamma(1/4)^2 / (2 sqrt(2 pi))`; the square lattice has `g2 = 4 w^4`.
const LEMNISCATE: f64 = 2.622_057_554_292_119_8;

fn direct_tail(lat: &Lattice, s: f64, from: f64, to: f64) -> f64 {
    lat.points_in_disk(to)
        .iter()
        .filter(|p| p.z.norm() > from)
        .map(|p| p.z.norm().powf(-s))
        .sum()
}

#[test]
fn disk_enumeration_matches_spec_examples() {
    let lat = Lattice::square();
    let pts = lattice_points_in_disk(&lat, 1.5);
    assert_eq!(pts.len(), 9);
    assert_eq!(pts[0], c(0.0, 0.0));
    assert_eq!(&pts[1..5], &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]);
    assert_eq!(lattice_points_in_disk(&lat, 0.5), vec![c(0.0, 0.0)]);
    let big = lat.scaled(2.0).unwrap();
    assert_eq!(lattice_points_in_disk(&big, 1.9), vec![c(0.0, 0.0)]);
}

#[test]
fn tail_bound_dominates_brute_force() {
    let lat = Lattice::square();
    for s in [3.0, 4.0] {
        let bound = lat.lattice_sum_tail_bound(s, 10.0).unwrap();
        let direct = direct_tail(&lat, s, 10.0, 200.0);
        assert!(bound >= direct, "s={s}: {bound} < {direct}");
    }
    let b4 = lat.lattice_sum_tail_bound(4.0, 10.0).unwrap();
    assert!((b4 - 0.036).abs() < 0.002, "{b4}");
    let mut prev = f64::INFINITY;
    for r in [10.0, 20.0, 40.0, 80.0, 160.0] {
        let b = lat.lattice_sum_tail_bound(4.0, r).unwrap();
        assert!(b < prev);
        prev = b;
    }
    assert!(prev < 1e-3);
    assert_eq!(lat.lattice_sum_tail_bound(2.0, 10.0), Err(Error::DivergentSum(2.0)));
}

#[test]
fn weierstrass_satisfies_its_differential_equation_on_square_lattice() {
    let curve = CurveFamily::weierstrass(Lattice::square()).unwrap();
    let CurveFamily::WeierstrassP(w) = &curve else { unreachable!() };
    let g2 = 4.0 * LEMNISCATE.powi(4);
    for z in [c(0.3, 0.1), c(0.21, 0.77), c(-0.4, 0.45), c(0.5, 0.5), c(0.11, -0.02)] {
        let (p, dp) = w.wp(z);
        let residual = dp * dp - 4.0 * p * p * p + g2 * p;
        assert!(residual.norm() < 1e-9 * (dp.norm_sqr() + 1.0), "z={z}: {residual}");
    }
}

#[test]
fn weierstrass_invariants_on_hexagonal_lattice() {
    // g2 vanishes for the hexagonal lattice, so wp'^2 - 4 wp^3 = -g3 is constant
    let curve = CurveFamily::weierstrass(hexagonal()).unwrap();
    let CurveFamily::WeierstrassP(w) = &curve else { unreachable!() };
    let invariant = |z: Complex64| {
        let (p, dp) = w.wp(z);
        dp * dp - 4.0 * p * p * p
    };
    let g3 = -invariant(c(0.37, 0.12));
    for z in [c(0.1, 0.2), c(0.6, 0.3), c(-0.25, 0.41), c(0.05, -0.33)] {
        assert!((invariant(z) + g3).norm() < 1e-8 * g3.norm(), "z={z}");
    }
    // g3 = 140 sum' lambda^{-6}; the brute-force tail beyond 400 is below 1e-9
    let lat = hexagonal();
    let g6: Complex64 = lat.points_in_disk(400.0).iter().skip(1).map(|p| p.z.powi(-6)).sum();
    assert!((g3 - 140.0 * g6).norm() < 1e-6 * g3.norm(), "{g3} vs {}", 140.0 * g6);
}

#[test]
fn weierstrass_is_doubly_periodic_and_even() {
    let lat = hexagonal();
    let curve = CurveFamily::weierstrass(lat.clone()).unwrap();
    let CurveFamily::WeierstrassP(w) = &curve else { unreachable!() };
    for z in [c(0.3, 0.1), c(0.2, -0.4)] {
        let (p, _) = w.wp(z);
        for shift in [lat.omega1(), lat.omega2(), lat.point(2, -3)] {
            assert!((w.wp(z + shift).0 - p).norm() < 1e-9 * p.norm());
        }
        assert!((w.wp(-z).0 - p).norm() < 1e-9 * p.norm());
    }
}

#[test]
fn constant_pattern_family_is_a_multiple_of_wp_prime() {
    // sum_lambda (z - lambda)^{-3} = -wp'(z) / 2
    let lat = Lattice::square();
    let a = vec![c(1.2, 0.5), c(-0.3, 1.1)];
    let pattern = CoefficientPattern::Constant { values: a.clone() };
    let fam = CurveFamily::lattice_family(lat.clone(), 1.0, 2, pattern).unwrap();
    let wp = CurveFamily::weierstrass(lat).unwrap();
    let CurveFamily::WeierstrassP(w) = &wp else { unreachable!() };
    for z in [c(0.3, 0.2), c(0.5, 0.5), c(-0.7, 0.35)] {
        let v = fam.homogeneous_value(z).unwrap();
        let (_, dp) = w.wp(z);
        let expect = vec![c(1.0, 0.0), -a[0] * dp / (2.0 * 2f64.sqrt()), -a[1] * dp / (2.0 * 2f64.sqrt())];
        let got = ProjectivePoint::new(v).unwrap();
        let want = ProjectivePoint::new(expect).unwrap();
        assert!(got.chordal_distance(&want).unwrap() < 1e-10, "z={z}");
    }
}

fn random_family(rows: Option<i64>) -> LatticeFamily {
    let spec = LatticeFamilySpec {
        lattice: Lattice::square(),
        amplitude: 1.0,
        dim: 2,
        pattern: CoefficientPattern::random(11),
        tail_tolerance: 1e-10,
        reparam: Default::default(),
    };
    match rows {
        Some(r) => LatticeFamily::with_rows(spec, r).unwrap(),
        None => LatticeFamily::new(spec.lattice, spec.amplitude, spec.dim, spec.pattern).unwrap(),
    }
}

#[test]
fn doubling_rows_stays_within_the_tail_bound() {
    for rows in [1, 2, 3] {
        let coarse = random_family(Some(rows));
        let fine = random_family(Some(2 * rows));
        let bound = coarse.tail_bound();
        let (a, b) = (CurveFamily::LatticeFamily(coarse), CurveFamily::LatticeFamily(fine));
        for z in [c(0.4, 0.3), c(1.7, -0.6), c(-0.2, 2.45)] {
            let ja = a.eval_jet(z).unwrap();
            let jb = b.eval_jet(z).unwrap();
            for (x, y) in ja.lift().iter().zip(jb.lift()).chain(ja.derivative().iter().zip(jb.derivative())) {
                assert!((x - y).norm() <= bound, "rows={rows} z={z}: {} > {bound}", (x - y).norm());
            }
        }
    }
    assert!(random_family(None).tail_bound() < 1e-10);
}

#[test]
fn random_family_is_periodic_under_the_block_lattice() {
    let fam = CurveFamily::LatticeFamily(random_family(None));
    let period = 3.0;
    for z in [c(0.4, 0.3), c(-1.2, 0.77)] {
        let p = fam.value(z).unwrap();
        for shift in [c(period, 0.0), c(0.0, period), c(-period, 2.0 * period)] {
            let q = fam.value(z + shift).unwrap();
            assert!(p.chordal_distance(&q).unwrap() < 1e-8);
        }
        // but not under the base lattice
        let q = fam.value(z + 1.0).unwrap();
        assert!(p.chordal_distance(&q).unwrap() > 1e-3);
    }
}

#[test]
fn chart_and_jet_agree_on_the_overlap() {
    let fam = CurveFamily::LatticeFamily(random_family(None));
    let lat = Lattice::square();
    let d = lat.delta() / 2.0;
    for k in 0..12 {
        let theta = 0.3 + k as f64 * 0.5;
        for centre in [c(0.0, 0.0), c(1.0, 2.0), c(-2.0, 1.0)] {
            let z = centre + Complex64::from_polar(d, theta);
            let via_chart = energy_density(&fam.eval_chart(z).unwrap().jet().unwrap());
            let via_jet = energy_density(&fam.eval_jet(z).unwrap());
            assert!((via_chart - via_jet).abs() < 1e-8 * via_jet.max(1.0), "z={z}");
        }
    }
}

#[test]
fn chart_values_stay_away_from_zero() {
    let fam = random_family(None);
    let lat = Lattice::square();
    let radius = lat.chart_radius().unwrap();
    let floor = fam.amplitude() / (2.0 * (fam.dim() as f64).sqrt());
    let curve = CurveFamily::LatticeFamily(fam);
    let mut rng = 0x2545F4914F6CDD1Du64;
    let mut next = || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..200 {
        let centre = lat.point((next() * 7.0) as i64 - 3, (next() * 7.0) as i64 - 3);
        let z = centre + Complex64::from_polar(0.999 * radius * next().sqrt(), 2.0 * PI * next());
        let chart = curve.eval_chart(z).unwrap();
        for g in &chart.values {
            assert!(g.norm() >= floor, "z={z}: |g|={}", g.norm());
        }
    }
}

#[test]
fn finite_difference_examples() {
    let line = CurveFamily::monomial(1);
    let fd = energy_density_fd(&line, c(0.0, 0.0), 1e-3).unwrap();
    assert!((fd - 1.0 / PI).abs() < 1e-5);
    let constant = CurveFamily::constant(ProjectivePoint::new(vec![c(1.0, 0.0), c(2.0, -1.0)]).unwrap());
    assert!(energy_density_fd(&constant, c(0.4, 0.1), 1e-3).unwrap().abs() < 1e-12);
    let exp = CurveFamily::exp_line(c(1.0, 0.0));
    let z = c(1.0, 1.0);
    let gap = (energy_density_fd(&exp, z, 1e-3).unwrap() - exp.energy_density(z).unwrap()).abs();
    assert!(gap < 1e-5);
    // [z : 1] has z_0 = 0 at the origin
    let flipped = CurveFamily::rational(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap();
    assert!(matches!(energy_density_fd(&flipped, c(0.0, 0.0), 1e-3), Err(Error::Chart(_))));
}

#[test]
fn closed_form_densities() {
    let at = |f: &CurveFamily, z| f.energy_density(z).unwrap();
    assert!((at(&CurveFamily::monomial(1), c(0.0, 0.0)) - 1.0 / PI).abs() < 1e-15);
    assert!((at(&CurveFamily::exp_line(c(1.0, 0.0)), c(0.0, 0.0)) - 0.25 / PI).abs() < 1e-15);
    let half = CurveFamily::monomial(1).rescale(2.0).unwrap();
    assert!((at(&half, c(0.0, 0.0)) - 0.25 / PI).abs() < 1e-15);
    for z in [c(0.3, -2.0), c(1.5, 0.5)] {
        let expect = 1.0 / (PI * (1.0 + z.norm_sqr()).powi(2));
        assert!((at(&CurveFamily::monomial(1), z) - expect).abs() < 1e-15);
    }
}

#[test]
fn line_energy_and_characteristic() {
    let line = CurveFamily::monomial(1);
    let (e1, _) = area_energy(&line, 1.0, 1e-8).unwrap();
    assert!((e1 - 0.5).abs() < 1e-6);
    let t = characteristic(&line, E, 1e-8).unwrap();
    let closed = 0.5 * ((1.0 + E * E) / 2.0).ln();
    assert!((t - closed).abs() < 1e-5, "{t} vs {closed}");
    let constant = CurveFamily::constant(ProjectivePoint::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap());
    assert_eq!(characteristic(&constant, 10.0, 1e-6).unwrap(), 0.0);
}

#[test]
fn swapped_exponential_has_the_same_profile() {
    let one = ExpTerm { coeff: c(1.0, 0.0), rate: c(0.0, 0.0) };
    let ez = ExpTerm { coeff: c(0.7, 0.2), rate: c(0.4, 0.9) };
    let f = CurveFamily::exponential(vec![one, ez]).unwrap();
    let g = CurveFamily::exponential(vec![ez, one]).unwrap();
    for r in [1.5, 3.0, 6.0] {
        let tf = characteristic(&f, r, 1e-9).unwrap();
        let tg = characteristic(&g, r, 1e-9).unwrap();
        assert!((tf - tg).abs() < 1e-8);
    }
}

#[test]
fn swapped_weierstrass_jet_has_the_same_density() {
    let curve = CurveFamily::weierstrass(Lattice::square()).unwrap();
    for z in [c(0.3, 0.1), c(0.45, 0.8), c(0.1, 0.15)] {
        let jet = curve.eval_jet(z).unwrap();
        let mut v = jet.lift().to_vec();
        let mut d = jet.derivative().to_vec();
        v.reverse();
        d.reverse();
        let swapped = ProjectiveJet::new(v, d).unwrap();
        let (a, b) = (energy_density(&jet), energy_density(&swapped));
        assert!((a - b).abs() < 1e-12 * a.max(1.0));
    }
}

#[test]
fn rescaling_divides_disk_energy_scale() {
    let curve = CurveFamily::weierstrass(Lattice::square()).unwrap();
    let sup = sup_norm_estimate(&curve, &Region::FundamentalDomain, 1e-6).unwrap();
    assert!(sup.converged);
    let g = brody_rescale(&curve, sup.sup_estimate).unwrap();
    let c = sup.sup_estimate;
    // disk energy of g at radius t equals that of f at t / c
    for t in [3.0 * c, 5.5 * c] {
        let (eg, err_g) = area_energy(&g, t, 1e-8).unwrap();
        let (ef, err_f) = area_energy(&curve, t / c, 1e-8).unwrap();
        assert!((eg - ef).abs() <= 1e-6 * ef + err_f + err_g, "{eg} vs {ef}");
    }
    let rescaled = sup_norm_estimate(&g, &Region::FundamentalDomain, 1e-6).unwrap();
    assert!((rescaled.sup_estimate - 1.0).abs() < 1e-6);
}

#[test]
fn counting_function_examples() {
    let single = PoleDivisor::new(vec![(c(1.0, 0.0), 1)]).unwrap();
    assert!((counting_function(&single, E).unwrap() - 1.0).abs() < 1e-15);
    let lat = Lattice::square();
    let simple = counting_function(&PoleDivisor::lattice(&lat, 1, 20.0).unwrap(), 20.0).unwrap();
    let double = counting_function(&PoleDivisor::lattice(&lat, 2, 20.0).unwrap(), 20.0).unwrap();
    assert!((simple / (PI * 200.0) - 1.0).abs() < 0.05);
    assert!((double / (2.0 * simple) - 1.0).abs() < 1e-14);
}
