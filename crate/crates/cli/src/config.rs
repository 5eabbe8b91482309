//! Run configuration: one TOML document with a section per subcommand.
//!
//! Precedence, lowest to highest: built-in defaults, the `--config` file,
//! command-line flags.

use std::path::Path;

use meandim::{Complex64, CurveFamily, Lattice};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub seed: u64,
    pub tol: f64,
    pub threads: Option<usize>,
    pub energy: EnergyConfig,
    pub brody: BrodyConfig,
    pub widim: WidimConfig,
    pub discretize: DiscretizeConfig,
    pub bounds: BoundsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: FORMAT_VERSION,
            seed: 0,
            tol: 1e-6,
            threads: None,
            energy: EnergyConfig::default(),
            brody: BrodyConfig::default(),
            widim: WidimConfig::default(),
            discretize: DiscretizeConfig::default(),
            bounds: BoundsConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.version != FORMAT_VERSION {
            return Err(CliError::Config(format!(
                "config version {} is not supported (expected {FORMAT_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyConfig {
    pub curve: CurveFamily,
    pub r_max: f64,
    /// Profile radii; empty means a geometric grid from 1 to `r_max`.
    pub radii: Vec<f64>,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self {
            curve: CurveFamily::monomial(2),
            r_max: 100.0,
            radii: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BrodyConfig {
    pub lattice: Lattice,
    pub amplitude: f64,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub band_factor: f64,
    pub period: usize,
}

impl Default for BrodyConfig {
    fn default() -> Self {
        Self {
            lattice: Lattice::square(),
            amplitude: 1.0,
            dims: vec![1, 2, 4, 8, 16],
            trials: 20,
            band_factor: 2.0,
            period: meandim::curves::DEFAULT_RANDOM_PERIOD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum WidimConfig {
    Cover {
        n: usize,
        m: u32,
        eps: f64,
        #[serde(default = "default_refinement")]
        refinement: u32,
        #[serde(default = "default_guard")]
        node_guard: u64,
    },
    Scan {
        base_dim: usize,
        #[serde(default = "default_rank")]
        rank: usize,
        #[serde(default = "default_scale")]
        scale: f64,
        eps: f64,
        n_min: u32,
        n_max: u32,
        #[serde(default)]
        cross_check: bool,
    },
}

fn default_refinement() -> u32 {
    meandim::widim::DEFAULT_REFINEMENT
}

fn default_guard() -> u64 {
    meandim::widim::DEFAULT_NODE_GUARD
}

fn default_rank() -> usize {
    1
}

fn default_scale() -> f64 {
    1.0
}

impl Default for WidimConfig {
    fn default() -> Self {
        WidimConfig::Cover {
            n: 2,
            m: 2,
            eps: 0.6,
            refinement: default_refinement(),
            node_guard: default_guard(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiscretizeConfig {
    /// Separation of two given curves.
    Pair {
        lattice: Lattice,
        radius: f64,
        #[serde(default)]
        use_jets: bool,
        curve_a: CurveFamily,
        curve_b: CurveFamily,
    },
    /// Seeded pairs of random exponential curves.
    RandomPairs {
        lattice: Lattice,
        radius: f64,
        dim: usize,
        trials: usize,
        threshold: f64,
    },
    /// Lattice pole count against its leading term.
    PoleCount {
        lattice: Lattice,
        multiplicity: u32,
        r: f64,
    },
}

impl Default for DiscretizeConfig {
    fn default() -> Self {
        let one = Complex64::new(1.0, 0.0);
        DiscretizeConfig::Pair {
            lattice: Lattice::square(),
            radius: 2.0,
            use_jets: false,
            curve_a: CurveFamily::exp_line(one),
            curve_b: CurveFamily::exp_line(-one),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub n: u32,
    pub e_value: f64,
    pub covolume: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            n: 2,
            e_value: 1.0,
            covolume: 4.0,
        }
    }
}
