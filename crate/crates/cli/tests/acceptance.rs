//! Acceptance criteria. Each check prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::f64::consts::{E, PI};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use meandim::brody::{
    brody_rescale, lattice_family_sup, prop31_experiment, sup_norm_estimate, trial_seed,
    Prop31Config, Prop31Report, Region,
};
use meandim::discretize::{exponential_separation_trials, pole_counting_check};
use meandim::nevanlinna::{area_energy, characteristic, limsup_estimates, EnergyProfile};
use meandim::widim::{min_order_box_cover, widim_growth_scan, GridCube, ShiftSystem};
use meandim::{
    energy_density_fd, CoefficientPattern, Complex64, CurveFamily, ExpTerm, Lattice,
    ProjectivePoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_917;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn degree_identity() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in 1..=3usize {
        let start = Instant::now();
        let (energy, _) = area_energy(&CurveFamily::monomial(d), 1e3, 1e-8).expect("quadrature");
        let took = start.elapsed();
        let ok = (energy - d as f64).abs() < 1e-3 && took < Duration::from_secs(10);
        pass &= ok;
        parts.push(format!("d={d}: E={energy:.9} ({:.2}s)", took.as_secs_f64()));
    }
    Outcome::new(pass, parts.join(", "))
}

fn closed_form_characteristic() -> Outcome {
    let t = characteristic(&CurveFamily::monomial(1), E, 1e-9).expect("quadrature");
    let closed = 0.5 * ((1.0 + E * E) / 2.0).ln();
    let gap = (t - closed).abs();
    Outcome::new(gap < 1e-5, format!("T(e)={t:.10}, closed form {closed:.10}, gap {gap:.2e}"))
}

fn brody_bound() -> Outcome {
    let radii = [1.0, 2.0, 4.0, 8.0, 16.0];
    let lat = Lattice::square();
    let mut curves = Vec::new();
    let wp = CurveFamily::weierstrass(lat.clone()).unwrap();
    let sup = sup_norm_estimate(&wp, &Region::FundamentalDomain, 1e-6).unwrap();
    curves.push(("wp".to_string(), brody_rescale(&wp, sup.sup_estimate).unwrap()));
    for n in [1usize, 2, 4, 8] {
        let f = CurveFamily::lattice_family(lat.clone(), 1.0, n, CoefficientPattern::random(trial_seed(SEED, n, 0)))
            .unwrap();
        let s = lattice_family_sup(&f, 1e-6).unwrap();
        curves.push((format!("f_a(N={n})"), brody_rescale(&f, s.sup_estimate).unwrap()));
    }
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    for (name, g) in &curves {
        let p = EnergyProfile::compute(g, &radii, 1e-6).unwrap();
        for (i, r) in radii.iter().enumerate() {
            let slack = PI * r * r / 2.0 + p.quadrature_error[i] - p.characteristic[i];
            if slack < 0.0 {
                pass = false;
                eprintln!("  {name}: T({r}) = {} exceeds pi r^2 / 2", p.characteristic[i]);
            }
            worst = worst.max(p.characteristic[i] / (PI * r * r / 2.0));
        }
    }
    Outcome::new(
        pass,
        format!("{} curves, radii {radii:?}, max T/(pi r^2/2) = {worst:.4}", curves.len()),
    )
}

fn elliptic_mean_energy() -> Outcome {
    let start = Instant::now();
    let wp = CurveFamily::weierstrass(Lattice::square()).unwrap();
    let (mean, packing) = limsup_estimates(&wp, 30.0, 1e-6).expect("quadrature");
    let took = start.elapsed();
    let target = 2.0 / Lattice::square().covolume();
    let rel = |x: f64| (x - target).abs() / target;
    let pass = rel(mean.window_max) < 0.02 && rel(packing.window_max) < 0.02 && took < Duration::from_secs(120);
    Outcome::new(
        pass,
        format!(
            "mean {:.5}, packing {:.5} (target {target}), {:.1}s",
            mean.window_max,
            packing.window_max,
            took.as_secs_f64()
        ),
    )
}

fn band_experiment() -> Prop31Report {
    let cfg = Prop31Config::new(Lattice::square(), 1.0, vec![1, 2, 4, 8, 16], 20, SEED);
    prop31_experiment(&cfg).expect("experiment")
}

fn proposition_band(report: &Prop31Report) -> Outcome {
    let converged = report.rows.iter().all(|r| r.converged);
    let maxima: Vec<String> = report.summaries.iter().map(|s| format!("N={}:{:.3}", s.n, s.max_sup)).collect();
    Outcome::new(
        report.band_ok && converged && report.overall_max <= 2.0 * report.baseline,
        format!(
            "baseline {:.4}, overall max {:.4}, per-N max [{}]",
            report.baseline,
            report.overall_max,
            maxima.join(" ")
        ),
    )
}

fn rescaled_draws(report: &Prop31Report) -> Outcome {
    let worst = report.rows.iter().map(|r| r.rescaled_sup).fold(0.0, f64::max);
    let all = report.rows.iter().all(|r| r.rescaled_sup <= 1.0 + 1e-6);
    Outcome::new(all, format!("{} draws, max rescaled sup {worst:.12}", report.rows.len()))
}

fn pole_counting() -> Outcome {
    let lat = Lattice::square();
    let one = pole_counting_check(&lat, 1, 20.0).unwrap();
    let two = pole_counting_check(&lat, 2, 20.0).unwrap();
    let pass = one.relative_gap < 0.05 && two.relative_gap < 0.05;
    Outcome::new(
        pass,
        format!(
            "N={:.2} vs {:.2} (gap {:.4}); mult 2: N={:.2} vs {:.2} (gap {:.4})",
            one.n_of_r, one.leading_term, one.relative_gap, two.n_of_r, two.leading_term, two.relative_gap
        ),
    )
}

fn separation_diagnostic() -> Outcome {
    let t = exponential_separation_trials(&Lattice::square(), 5.0, 1, 100, SEED, 0.0).unwrap();
    let min = t.separations.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome::new(
        t.separated == 100,
        format!("{}/100 separated, smallest separation {min:.3e}", t.separated),
    )
}

fn cube_cover_order() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, m) in [(1usize, 2u32), (1, 3), (2, 2), (2, 3)] {
        let cube = GridCube::new(n, m).unwrap();
        let r = min_order_box_cover(&cube, 0.6);
        let order = r.as_ref().map(|r| r.order as i64).unwrap_or(-1);
        pass &= order == n as i64;
        let big = [1.0, 2.0].iter().all(|&e| min_order_box_cover(&cube, e).map(|r| r.order) == Ok(0));
        pass &= big;
        parts.push(format!("({n},{m}):{order}{}", if big { "" } else { " eps>=1 FAILED" }));
    }
    let took = start.elapsed();
    pass &= took < Duration::from_secs(300);
    Outcome::new(pass, format!("orders {} , {:.2}s", parts.join(" "), took.as_secs_f64()))
}

fn growth_rates() -> Outcome {
    let sys = ShiftSystem::new(2, 1).unwrap();
    let n: Vec<u32> = (1..=400).collect();
    let scan = widim_growth_scan(&sys, 0.25, &n, false).unwrap();
    let formulas = scan
        .rows
        .iter()
        .all(|r| r.lower == 2.0 * r.n as f64 && r.upper == 2.0 * (r.n as f64 + 9.0));
    let last = scan.rows.last().unwrap();
    let gap = (last.upper_rate - last.lower_rate) / last.upper_rate;
    Outcome::new(
        formulas && scan.s == 5 && gap < 0.05,
        format!("s={}, L(400)={}, U(400)={}, rate gap {gap:.4}", scan.s, last.lower, last.upper),
    )
}

fn fd_families() -> Vec<(&'static str, CurveFamily)> {
    let lat = Lattice::square();
    vec![
        (
            "constant",
            CurveFamily::constant(ProjectivePoint::new(vec![c(1.0, 0.0), c(0.3, 0.2), c(-0.5, 0.1)]).unwrap()),
        ),
        (
            "rational",
            CurveFamily::rational(vec![
                vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(0.0, 0.0), c(2.0, 1.0)],
                vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            ])
            .unwrap(),
        ),
        (
            "exponential",
            CurveFamily::exponential(vec![
                ExpTerm { coeff: c(1.0, 0.0), rate: c(0.0, 0.0) },
                ExpTerm { coeff: c(1.0, 0.0), rate: c(1.0, 0.0) },
                ExpTerm { coeff: c(0.5, 0.5), rate: c(0.0, 1.0) },
            ])
            .unwrap(),
        ),
        ("weierstrass_p", CurveFamily::weierstrass(lat.clone()).unwrap()),
        (
            "lattice_family",
            CurveFamily::lattice_family(lat, 1.0, 2, CoefficientPattern::random(SEED)).unwrap(),
        ),
    ]
}

fn finite_difference_check() -> Outcome {
    let lat = Lattice::square();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut total_h, mut total_half) = (0.0, 0.0);
    let mut within = 0;
    let mut points = 0;
    let mut per_family = Vec::new();
    for (name, f) in fd_families() {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let z = loop {
                let z = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
                if lat.distance_to_lattice(z) > lat.delta() / 2.0 {
                    break z;
                }
            };
            let exact = f.energy_density(z).unwrap();
            let g1 = (energy_density_fd(&f, z, 1e-3).unwrap() - exact).abs();
            let g2 = (energy_density_fd(&f, z, 5e-4).unwrap() - exact).abs();
            points += 1;
            if g1 <= 1e-5 {
                within += 1;
            }
            worst = worst.max(g1);
            total_h += g1;
            total_half += g2;
        }
        per_family.push(format!("{name} {worst:.1e}"));
    }
    let ratio = total_h / total_half;
    let pass = within == points && (3.5..=4.5).contains(&ratio);
    Outcome::new(
        pass,
        format!(
            "{within}/{points} points within 1e-5 at h=1e-3, gap ratio h/(h/2) {ratio:.3}; worst gap per family: {}",
            per_family.join(", ")
        ),
    )
}

fn run_cli(dir: &Path, config: &str, args: &[&str]) -> bool {
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_meandim"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
        .status;
    status.success()
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.join("out"))
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let runs: [(&str, &str, &[&str]); 7] = [
        ("energy", "[energy]\nr_max = 12.0\n[energy.curve]\nkind = \"weierstrass_p\"\nlattice = { omega1 = [1.0, 0.0], omega2 = [0.0, 1.0] }\n", &["energy"]),
        ("brody", "", &["brody", "--dims", "1,2,4", "--trials", "3"]),
        ("widim", "", &["widim", "--n", "2", "--m", "3", "--eps", "0.6"]),
        ("scan", "[widim]\nmode = \"scan\"\nbase_dim = 2\neps = 0.25\nn_min = 1\nn_max = 50\ncross_check = true\n", &["widim"]),
        ("pairs", "[discretize]\nmode = \"random_pairs\"\nlattice = { omega1 = [1.0, 0.0], omega2 = [0.0, 1.0] }\nradius = 5.0\ndim = 2\ntrials = 50\nthreshold = 0.0\n", &["discretize"]),
        ("poles", "[discretize]\nmode = \"pole_count\"\nlattice = { omega1 = [1.0, 0.0], omega2 = [0.0, 1.0] }\nmultiplicity = 2\nr = 20.0\n", &["discretize"]),
        ("bounds", "", &["bounds", "--n", "3", "--e", "0.5", "--covolume", "1"]),
    ];
    let mut pass = true;
    let mut files = 0;
    let seed = SEED.to_string();
    for (name, config, args) in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let mut full: Vec<&str> = vec!["--seed", &seed];
        full.extend_from_slice(args);
        let ok = run_cli(a.path(), config, &full) && run_cli(b.path(), config, &full);
        let same = ok && snapshot(a.path()) == snapshot(b.path());
        if !same {
            eprintln!("  {name}: outputs differ or the run failed");
        }
        files += snapshot(a.path()).len();
        pass &= same;
    }
    Outcome::new(pass, format!("7 runs repeated, {files} files compared byte for byte"))
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut record = |id: u32, name: &'static str, o: Outcome| {
        println!("criterion {id:>2} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };
    record(1, "degree identity", degree_identity());
    record(2, "closed-form characteristic", closed_form_characteristic());
    record(3, "Brody bound on T(r)", brody_bound());
    record(4, "elliptic mean energy", elliptic_mean_energy());
    let report = band_experiment();
    record(5, "N-independent sup band", proposition_band(&report));
    record(6, "rescaled draws are Brody", rescaled_draws(&report));
    record(7, "lattice pole counting", pole_counting());
    record(8, "discretization separation", separation_diagnostic());
    record(9, "cube cover order", cube_cover_order());
    record(10, "shift growth rates", growth_rates());
    record(11, "finite-difference cross-check", finite_difference_check());
    record(12, "CLI determinism", determinism());
    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
