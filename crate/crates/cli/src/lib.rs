//! Batch front end for the `meandim` experiments.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use output::{Cell, Meta, Output};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] meandim::Error),
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for configuration errors, 3 for numerical non-convergence, 4 when
    /// a search guard is hit, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use meandim::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::SearchGuardExceeded { .. } => 4,
                E::InvalidInput(_)
                | E::InvalidPoint
                | E::DimensionMismatch { .. }
                | E::DegenerateLattice
                | E::DivergentSum(_)
                | E::CoefficientOutOfAnnulus { .. } => 2,
                _ => 3,
            },
            CliError::NotConverged(_) => 3,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "meandim", version, about = "Energy, Brody and widim experiments for curves in CP^N")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Disk energy, characteristic function and limsup estimates.
    Energy {
        #[arg(long)]
        r_max: Option<f64>,
    },
    /// Sup-norm experiment over random lattice families.
    Brody {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        amplitude: Option<f64>,
    },
    /// Minimum grid-box cover order, or a growth scan in scan mode.
    Widim {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Separation of lattice discretizations and pole counts.
    Discretize,
    /// Lower and upper mean-dimension bounds.
    Bounds {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        e: Option<f64>,
        #[arg(long)]
        covolume: Option<f64>,
    },
}

/// Applies the file and the flags on top of the defaults.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let g = &cli.global;
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.tol {
        if !(t > 0.0) {
            return Err(CliError::Config(format!("tolerance {t} must be positive")));
        }
        cfg.tol = t;
    }
    if let Some(t) = g.threads {
        cfg.threads = Some(t);
    }
    match &cli.command {
        Command::Energy { r_max } => {
            if let Some(r) = r_max {
                cfg.energy.r_max = *r;
            }
        }
        Command::Brody {
            dims,
            trials,
            amplitude,
        } => {
            if let Some(d) = dims {
                cfg.brody.dims = d.clone();
            }
            if let Some(t) = trials {
                cfg.brody.trials = *t;
            }
            if let Some(a) = amplitude {
                cfg.brody.amplitude = *a;
            }
        }
        Command::Widim { n, m, eps } => {
            if n.is_some() || m.is_some() || eps.is_some() {
                match &mut cfg.widim {
                    config::WidimConfig::Cover {
                        n: cn,
                        m: cm,
                        eps: ce,
                        ..
                    } => {
                        *cn = n.unwrap_or(*cn);
                        *cm = m.unwrap_or(*cm);
                        *ce = eps.unwrap_or(*ce);
                    }
                    config::WidimConfig::Scan { eps: ce, base_dim, .. } => {
                        if m.is_some() {
                            return Err(CliError::Config("--m applies to cover mode only".into()));
                        }
                        *ce = eps.unwrap_or(*ce);
                        *base_dim = n.unwrap_or(*base_dim);
                    }
                }
            }
        }
        Command::Discretize => {}
        Command::Bounds { n, e, covolume } => {
            cfg.bounds.n = n.unwrap_or(cfg.bounds.n);
            cfg.bounds.e_value = e.unwrap_or(cfg.bounds.e_value);
            cfg.bounds.covolume = covolume.unwrap_or(cfg.bounds.covolume);
        }
    }
    Ok(cfg)
}

/// Runs one subcommand and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = resolve(cli)?;
    let mut out = Output::new(&cli.global.out_dir, &cfg)?;
    out.config_file()?;
    let work = |out: &mut Output| match &cli.command {
        Command::Energy { .. } => commands::energy(&cfg, out),
        Command::Brody { .. } => commands::brody(&cfg, out),
        Command::Widim { .. } => commands::widim(&cfg, out),
        Command::Discretize => commands::discretize(&cfg, out),
        Command::Bounds { .. } => commands::bounds(&cfg, out),
    };
    match cfg.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Config(e.to_string()))?;
            pool.install(|| work(&mut out))?
        }
        None => work(&mut out)?,
    }
    Ok(out.written().to_vec())
}
