use proptest::prelude::*;

use meandim::discretize::{restrict, separation};
use meandim::nevanlinna::EnergyProfile;
use meandim::widim::{
    cover_order, dynamical_distance, min_order_box_cover, FiniteConfig, GridCube, ShiftSystem,
};
use meandim::{
    chordal_distance, energy_density, CoefficientPattern, Complex64, CurveFamily, ExpTerm, Lattice, ProjectiveJet,
    ProjectivePoint,
};

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex(), n).prop_filter("nonzero", |v| v.iter().any(|c| c.norm() > 0.1))
}

/// Gram-Schmidt on the columns of a random matrix.
fn unitary(cols: Vec<Vec<Complex64>>) -> Option<Vec<Vec<Complex64>>> {
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for mut v in cols {
        for u in &out {
            let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-3 {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        out.push(v);
    }
    Some(out)
}

fn apply(u: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    (0..v.len())
        .map(|i| u.iter().zip(v).map(|(col, x)| col[i] * x).sum())
        .collect()
}

fn exp_curve() -> impl Strategy<Value = CurveFamily> {
    prop::collection::vec((complex(), complex()), 3).prop_filter_map("curve", |terms| {
        let terms = terms
            .into_iter()
            .map(|(coeff, rate)| ExpTerm {
                coeff: coeff + Complex64::new(0.5, 0.0),
                rate: rate * 0.5,
            })
            .collect();
        CurveFamily::exponential(terms).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_is_unitarily_invariant(v in vector(3), d in vector(3), m in prop::collection::vec(vector(3), 3)) {
        let Some(u) = unitary(m) else { return Ok(()) };
        let a = energy_density(&ProjectiveJet::new(v.clone(), d.clone()).unwrap());
        let b = energy_density(&ProjectiveJet::new(apply(&u, &v), apply(&u, &d)).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn density_is_lift_invariant(v in vector(3), d in vector(3), c in complex(), dc in complex()) {
        prop_assume!(c.norm() > 0.1);
        let a = energy_density(&ProjectiveJet::new(v.clone(), d.clone()).unwrap());
        let jet = ProjectiveJet::new(v, d).unwrap().relift(c, dc).unwrap();
        prop_assert!((a - energy_density(&jet)).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn chordal_distance_is_a_metric(p in vector(3), q in vector(3), r in vector(3)) {
        let (p, q, r) = (
            ProjectivePoint::new(p).unwrap(),
            ProjectivePoint::new(q).unwrap(),
            ProjectivePoint::new(r).unwrap(),
        );
        let pq = chordal_distance(&p, &q).unwrap();
        prop_assert!((pq - chordal_distance(&q, &p).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
        let pr = chordal_distance(&p, &r).unwrap();
        let rq = chordal_distance(&r, &q).unwrap();
        prop_assert!(pq <= pr + rq + 1e-12);
        prop_assert!(chordal_distance(&p, &p).unwrap() < 1e-7);
    }

    #[test]
    fn weierstrass_swap_isometry(z in complex()) {
        let curve = CurveFamily::weierstrass(Lattice::square()).unwrap();
        prop_assume!(Lattice::square().distance_to_lattice(z) > 0.2);
        let jet = curve.eval_jet(z).unwrap();
        let mut v = jet.lift().to_vec();
        let mut d = jet.derivative().to_vec();
        v.swap(0, 1);
        d.swap(0, 1);
        let a = curve.energy_density(z).unwrap();
        let b = energy_density(&ProjectiveJet::new(v, d).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn rational_translation_matches_evaluation(
        p in prop::collection::vec(complex(), 1..4),
        q in prop::collection::vec(complex(), 1..4),
        a in complex(),
        z in complex(),
    ) {
        let Ok(f) = CurveFamily::rational(vec![p, q]) else { return Ok(()) };
        let (Ok(x), Ok(y)) = (f.translate(a).value(z), f.value(z + a)) else { return Ok(()) };
        prop_assert!(chordal_distance(&x, &y).unwrap() < 1e-9);
    }

    #[test]
    fn restriction_is_translation_equivariant(i in -2i64..3, j in -2i64..3, seed in 0u64..1000) {
        let lat = Lattice::square();
        let shift = lat.point(i, j);
        let curves = [
            CurveFamily::exp_line(Complex64::new(0.3, 0.8)),
            CurveFamily::lattice_family(lat.clone(), 1.0, 2, CoefficientPattern::random(seed)).unwrap(),
        ];
        for f in &curves {
            let base = restrict(f, &lat, 6.0).unwrap();
            let moved = restrict(&f.translate(shift), &lat, 6.0 - shift.norm()).unwrap();
            for s in &moved.samples {
                let t = base
                    .samples
                    .iter()
                    .find(|b| (b.lambda - (s.lambda + shift)).norm() < 1e-12)
                    .unwrap();
                prop_assert!(chordal_distance(&s.value, &t.value).unwrap() < 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn separation_is_symmetric_and_subadditive(f in exp_curve(), g in exp_curve(), h in exp_curve()) {
        let lat = Lattice::square();
        let fg = separation(&f, &g, &lat, 3.0, false).unwrap();
        prop_assert!((fg - separation(&g, &f, &lat, 3.0, false).unwrap()).abs() < 1e-12);
        let fh = separation(&f, &h, &lat, 3.0, false).unwrap();
        let hg = separation(&h, &g, &lat, 3.0, false).unwrap();
        prop_assert!(fg <= fh + hg + 1e-12);
        prop_assert!(separation(&f, &f, &lat, 3.0, false).unwrap() < 1e-7);
    }

    #[test]
    fn jet_separation_dominates_value_separation(f in exp_curve(), g in exp_curve()) {
        let lat = Lattice::square();
        let values = separation(&f, &g, &lat, 3.0, false).unwrap();
        let jets = separation(&f, &g, &lat, 3.0, true).unwrap();
        prop_assert!(jets >= values - 1e-12);
    }

    #[test]
    fn min_order_is_nonincreasing_in_mesh(n in 1usize..3, m in 2u32..4, e1 in 0.3..1.2f64, e2 in 0.3..1.2f64) {
        prop_assume!(n == 1 || m == 2 || e1.max(e2) < 0.7);
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let cube = GridCube::new(n, m).unwrap();
        let a = min_order_box_cover(&cube, lo).unwrap();
        let b = min_order_box_cover(&cube, hi).unwrap();
        prop_assert!(b.order <= a.order);
        for r in [&a, &b] {
            prop_assert_eq!(cover_order(&r.cover).unwrap(), r.order);
            prop_assert!(r.cover.mesh() <= r.epsilon + 1e-12);
        }
    }

    #[test]
    fn dynamical_distance_properties(
        xs in prop::collection::vec(0.0..1.0f64, 6),
        ys in prop::collection::vec(0.0..1.0f64, 6),
        g in -3i64..4,
        extra in -4i64..5,
    ) {
        let sys = ShiftSystem::new(1, 1).unwrap();
        let build = |v: &[f64]| {
            v.iter().enumerate().fold(FiniteConfig::new(), |c, (a, x)| c.with(vec![a as i64 - 2], vec![*x]))
        };
        let (x, y) = (build(&xs), build(&ys));
        let base: f64 = xs.iter().zip(&ys).enumerate()
            .map(|(a, (p, q))| 0.5f64.powi((a as i32 - 2).abs()) * (p - q).abs())
            .sum();
        let d0 = dynamical_distance(&sys, &x, &y, &[vec![0]]).unwrap();
        prop_assert!((d0 - base).abs() < 1e-14);
        let wider = dynamical_distance(&sys, &x, &y, &[vec![0], vec![extra]]).unwrap();
        prop_assert!(wider >= d0);
        let window = [vec![0], vec![1], vec![extra]];
        let moved: Vec<Vec<i64>> = window.iter().map(|w| vec![w[0] - g]).collect();
        let d = dynamical_distance(&sys, &x, &y, &window).unwrap();
        let shifted = dynamical_distance(&sys, &x.shifted(&[g]), &y.shifted(&[g]), &moved).unwrap();
        prop_assert!((d - shifted).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn profiles_are_monotone(p in prop::collection::vec(complex(), 2..4), q in prop::collection::vec(complex(), 1..3)) {
        let Ok(f) = CurveFamily::rational(vec![q, p]) else { return Ok(()) };
        let profile = EnergyProfile::compute(&f, &[1.0, 1.5, 2.5, 4.0, 7.0], 1e-7).unwrap();
        for w in profile.characteristic.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
        for w in profile.disk_energy.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
    }
}
