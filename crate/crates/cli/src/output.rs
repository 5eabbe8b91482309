//! CSV and JSON writers that stamp every file with run metadata.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

/// Identity of a run, embedded in every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub config_sha256: String,
    pub seed: u64,
    pub generator: String,
    pub version: String,
}

impl Meta {
    pub fn for_config(cfg: &RunConfig) -> Result<Self, CliError> {
        let text = cfg.to_toml()?;
        Ok(Self {
            config_sha256: hex::encode(Sha256::digest(text.as_bytes())),
            seed: cfg.seed,
            generator: meandim::curves::GENERATOR_ID.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }
}

/// A CSV cell. Floats are written in scientific notation with 17
/// significant digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    U(u64),
    B(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:.16e}"),
            Cell::U(n) => n.to_string(),
            Cell::B(b) => b.to_string(),
        }
    }
}

pub struct Output {
    dir: PathBuf,
    meta: Meta,
    config: RunConfig,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path, config: &RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            meta: Meta::for_config(config)?,
            config: config.clone(),
            written: Vec::new(),
        })
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes the resolved configuration next to the results.
    pub fn config_file(&mut self) -> Result<(), CliError> {
        let path = self.dir.join("config.resolved.toml");
        std::fs::write(&path, self.config.to_toml()?)?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut out = BufWriter::new(File::create(&path)?);
        writeln!(out, "# config_sha256={}", self.meta.config_sha256)?;
        writeln!(out, "# seed={}", self.meta.seed)?;
        writeln!(out, "# generator={}", self.meta.generator)?;
        writeln!(out, "# version={}", self.meta.version)?;
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(header)?;
            for row in rows {
                w.write_record(row.iter().map(Cell::render))?;
            }
            w.flush()?;
        }
        out.flush()?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, payload: &T) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            meta: &'a Meta,
            config: &'a RunConfig,
            result: &'a T,
        }
        let path = self.dir.join(name);
        let mut out = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(
            &mut out,
            &Doc {
                meta: &self.meta,
                config: &self.config,
                result: payload,
            },
        )?;
        writeln!(out)?;
        out.flush()?;
        self.written.push(path);
        Ok(())
    }
}
