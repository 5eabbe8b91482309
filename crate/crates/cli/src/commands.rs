//! One function per subcommand. Each reads its section of the resolved
//! configuration and writes its files through [`Output`].

use meandim::brody::{bounds_report, prop31_experiment, Prop31Config};
use meandim::discretize::{exponential_separation_trials, pole_counting_check, separation};
use meandim::nevanlinna::{estimates_from_profile, window_radii, EnergyProfile};
use meandim::widim::{min_order_box_cover_with, widim_growth_scan, GridCube, ShiftSystem};
use serde::Serialize;

use crate::config::{DiscretizeConfig, RunConfig, WidimConfig};
use crate::output::{Cell, Output};
use crate::CliError;

/// Radii of an energy profile: a geometric grid from 1 to `r_max` with 8
/// points per doubling, merged with the limsup window.
pub fn profile_radii(r_max: f64, explicit: &[f64]) -> Vec<f64> {
    let mut radii: Vec<f64> = if explicit.is_empty() {
        let steps = (8.0 * r_max.log2()).ceil().max(1.0) as usize;
        (0..=steps)
            .map(|i| r_max.powf(i as f64 / steps as f64))
            .collect()
    } else {
        explicit.to_vec()
    };
    if r_max >= 4.0 {
        radii.extend(window_radii(r_max));
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * *b);
    radii
}

#[derive(Serialize)]
struct EnergySummary {
    curve: &'static str,
    r_max: f64,
    total_energy: f64,
    total_energy_error: f64,
    characteristic: f64,
    mean_energy: Option<meandim::nevanlinna::LimsupEstimate>,
    packing_density: Option<meandim::nevanlinna::LimsupEstimate>,
}

pub fn energy(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let e = &cfg.energy;
    if !(e.r_max >= 1.0) {
        return Err(CliError::Config(format!("r_max {} must be at least 1", e.r_max)));
    }
    let radii = profile_radii(e.r_max, &e.radii);
    let profile = EnergyProfile::compute(&e.curve, &radii, cfg.tol)?;
    let rows: Vec<Vec<Cell>> = profile
        .rows()
        .iter()
        .map(|r| {
            vec![
                Cell::F(r.r),
                Cell::F(r.disk_energy),
                Cell::F(r.characteristic),
                Cell::F(r.mean_running),
                Cell::F(r.packing_running),
                Cell::F(r.err),
            ]
        })
        .collect();
    out.csv(
        "energy_profile.csv",
        &["r", "disk_energy", "T", "mean_running", "packing_running", "err"],
        &rows,
    )?;
    let last = profile.radii.len() - 1;
    let (mean, packing) = if e.r_max >= 4.0 {
        let (m, p) = estimates_from_profile(&profile, e.r_max)?;
        (Some(m), Some(p))
    } else {
        (None, None)
    };
    out.json(
        "energy_summary.json",
        &EnergySummary {
            curve: e.curve.kind(),
            r_max: e.r_max,
            total_energy: profile.disk_energy[last],
            total_energy_error: profile.quadrature_error[last],
            characteristic: profile.characteristic[last],
            mean_energy: mean,
            packing_density: packing,
        },
    )
}

pub fn brody(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let b = &cfg.brody;
    let mut exp = Prop31Config::new(b.lattice.clone(), b.amplitude, b.dims.clone(), b.trials, cfg.seed);
    exp.tol = cfg.tol;
    exp.band_factor = b.band_factor;
    exp.period = b.period;
    let report = prop31_experiment(&exp)?;
    let rows: Vec<Vec<Cell>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::U(r.n as u64),
                Cell::U(r.trial as u64),
                Cell::U(r.seed),
                Cell::F(r.sup),
                Cell::B(r.converged),
                Cell::F(r.rescaled_sup),
            ]
        })
        .collect();
    out.csv(
        "brody_trials.csv",
        &["N", "trial", "seed", "sup", "converged", "rescaled_sup"],
        &rows,
    )?;
    #[derive(Serialize)]
    struct Summary<'a> {
        constant_baseline: f64,
        baseline: f64,
        overall_max: f64,
        band_factor: f64,
        band_ok: bool,
        rescaled_ok: bool,
        summaries: &'a [meandim::brody::DimSummary],
    }
    let rescaled_ok = report.rows.iter().all(|r| r.rescaled_sup <= 1.0 + 1e-6);
    out.json(
        "brody_summary.json",
        &Summary {
            constant_baseline: report.constant_baseline,
            baseline: report.baseline,
            overall_max: report.overall_max,
            band_factor: b.band_factor,
            band_ok: report.band_ok,
            rescaled_ok,
            summaries: &report.summaries,
        },
    )?;
    let unconverged = report.rows.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        return Err(CliError::NotConverged(format!(
            "{unconverged} sup-norm scans did not converge"
        )));
    }
    Ok(())
}

pub fn widim(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    match &cfg.widim {
        WidimConfig::Cover {
            n,
            m,
            eps,
            refinement,
            node_guard,
        } => {
            let cube = GridCube::new(*n, *m)?;
            let result = min_order_box_cover_with(&cube, *eps, *refinement, *node_guard)?;
            #[derive(Serialize)]
            struct Witness<'a> {
                n: usize,
                m: u32,
                eps: f64,
                order: u32,
                mesh: f64,
                nodes: u64,
                denominator: u32,
                boxes: Vec<Vec<(f64, f64)>>,
                grid_boxes: &'a [meandim::widim::GridBox],
            }
            out.json(
                "widim_cover.json",
                &Witness {
                    n: *n,
                    m: *m,
                    eps: *eps,
                    order: result.order,
                    mesh: result.cover.mesh(),
                    nodes: result.nodes,
                    denominator: result.cover.denominator,
                    boxes: result.cover.intervals(),
                    grid_boxes: &result.cover.boxes,
                },
            )
        }
        WidimConfig::Scan {
            base_dim,
            rank,
            scale,
            eps,
            n_min,
            n_max,
            cross_check,
        } => {
            if n_min > n_max || *n_min == 0 {
                return Err(CliError::Config(format!("bad window range {n_min}..={n_max}")));
            }
            let sys = ShiftSystem::with_scale(*base_dim, *rank, *scale)?;
            let n: Vec<u32> = (*n_min..=*n_max).collect();
            let scan = widim_growth_scan(&sys, *eps, &n, *cross_check)?;
            let rows: Vec<Vec<Cell>> = scan
                .rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::U(r.n as u64),
                        Cell::F(r.lower),
                        Cell::F(r.upper),
                        Cell::F(r.lower_rate),
                        Cell::F(r.upper_rate),
                        Cell::U(r.s as u64),
                    ]
                })
                .collect();
            out.csv("widim_scan.csv", &["n", "L", "U", "L_rate", "U_rate", "s"], &rows)?;
            out.json("widim_scan.json", &scan)
        }
    }
}

pub fn discretize(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    match &cfg.discretize {
        DiscretizeConfig::Pair {
            lattice,
            radius,
            use_jets,
            curve_a,
            curve_b,
        } => {
            let value = separation(curve_a, curve_b, lattice, *radius, false)?;
            let jets = if *use_jets {
                Some(separation(curve_a, curve_b, lattice, *radius, true)?)
            } else {
                None
            };
            #[derive(Serialize)]
            struct Report {
                radius: f64,
                separation: f64,
                jet_separation: Option<f64>,
                separated: bool,
            }
            out.json(
                "separation.json",
                &Report {
                    radius: *radius,
                    separation: value,
                    jet_separation: jets,
                    separated: value > 0.0,
                },
            )
        }
        DiscretizeConfig::RandomPairs {
            lattice,
            radius,
            dim,
            trials,
            threshold,
        } => {
            let t = exponential_separation_trials(lattice, *radius, *dim, *trials, cfg.seed, *threshold)?;
            let rows: Vec<Vec<Cell>> = t
                .separations
                .iter()
                .enumerate()
                .map(|(i, d)| vec![Cell::U(i as u64), Cell::F(*d), Cell::B(*d > *threshold)])
                .collect();
            out.csv("separation_trials.csv", &["trial", "separation", "separated"], &rows)?;
            out.json("separation_summary.json", &t)
        }
        DiscretizeConfig::PoleCount {
            lattice,
            multiplicity,
            r,
        } => {
            let check = pole_counting_check(lattice, *multiplicity, *r)?;
            out.json("pole_count.json", &check)
        }
    }
}

pub fn bounds(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let b = &cfg.bounds;
    let report = bounds_report(b.n, b.e_value, b.covolume)?;
    out.json("bounds.json", &report)
}
