//! TOML experiment configuration: one document per experiment, with
//! sections for the grid, the potential source, the ground-state study,
//! the evolution parameters, the analysis knobs and sweep cells.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::{
    generate_random, stock_ho, stock_r1, stock_r2, PotentialSpec, FOURIER_MODES,
};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub grid: GridConfig,
    pub potential: Option<PotentialConfig>,
    pub gs_study: Option<GsStudyConfig>,
    pub evolve: Option<EvolveConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    pub sweep: Option<SweepConfig>,
}

impl ExperimentConfig {
    /// Parses a config document; returns the config together with the raw
    /// text (hashed into provenance headers).
    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let config = Self::parse(&text)?;
        Ok((config, text))
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_x_min")]
    pub x_min: f64,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
}

fn default_x_min() -> f64 {
    -15.0
}
fn default_x_max() -> f64 {
    15.0
}
fn default_n_points() -> usize {
    1201
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_min: default_x_min(),
            x_max: default_x_max(),
            n_points: default_n_points(),
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.x_min, self.x_max, self.n_points)
            .map_err(|e| Error::Config(format!("grid: {e}")))
    }
}

/// Where a potential comes from: a .pot file, a stock name (ho, r1, r2) or
/// inline parameters.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub file: Option<PathBuf>,
    pub stock: Option<String>,
    pub variant: Option<String>,
    pub omega: Option<f64>,
    pub lambda: Option<f64>,
    pub half_width: Option<f64>,
    pub seed: Option<u64>,
    pub a: Option<[f64; FOURIER_MODES]>,
    pub b: Option<[f64; FOURIER_MODES]>,
    pub values: Option<Vec<f64>>,
}

impl PotentialConfig {
    pub fn resolve(&self, base_dir: &Path) -> Result<PotentialSpec> {
        if let Some(file) = &self.file {
            let path = if file.is_absolute() {
                file.clone()
            } else {
                base_dir.join(file)
            };
            return PotentialSpec::load(&path);
        }
        if let Some(stock) = &self.stock {
            return match stock.as_str() {
                "ho" => Ok(stock_ho()),
                "r1" => Ok(stock_r1()),
                "r2" => Ok(stock_r2()),
                other => Err(Error::Config(format!(
                    "potential.stock must be ho, r1 or r2, got '{other}'"
                ))),
            };
        }
        match self.variant.as_deref() {
            Some("harmonic") => {
                let omega = self
                    .omega
                    .ok_or_else(|| Error::Config("potential.omega required".into()))?;
                PotentialSpec::harmonic(omega).map_err(|e| Error::Config(e.to_string()))
            }
            Some("random-fourier") => {
                let lambda = self
                    .lambda
                    .ok_or_else(|| Error::Config("potential.lambda required".into()))?;
                let half_width = self.half_width.unwrap_or(15.0);
                if let (Some(a), Some(b)) = (self.a, self.b) {
                    PotentialSpec::random_fourier(lambda, half_width, a, b, self.seed)
                        .map_err(|e| Error::Config(e.to_string()))
                } else {
                    let seed = self
                        .seed
                        .ok_or_else(|| Error::Config("potential.seed required".into()))?;
                    generate_random(seed, lambda, half_width)
                        .map_err(|e| Error::Config(e.to_string()))
                }
            }
            Some("tabulated") => {
                let values = self
                    .values
                    .clone()
                    .ok_or_else(|| Error::Config("potential.values required".into()))?;
                PotentialSpec::tabulated(values).map_err(|e| Error::Config(e.to_string()))
            }
            Some(other) => Err(Error::Config(format!(
                "unknown potential.variant '{other}'"
            ))),
            None => Err(Error::Config(
                "potential needs one of: file, stock, variant".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GsStudyConfig {
    /// "sho" or "random".
    pub family: String,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default = "default_omega_min")]
    pub omega_min: f64,
    #[serde(default = "default_omega_max")]
    pub omega_max: f64,
    #[serde(default = "default_reference_omega")]
    pub reference_omega: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_omega_min() -> f64 {
    0.05
}
fn default_omega_max() -> f64 {
    2.20
}
fn default_reference_omega() -> f64 {
    0.1
}
fn default_lambda() -> f64 {
    0.1
}
fn default_half_width() -> f64 {
    15.0
}
fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub epsilon0: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_output_stride")]
    pub output_stride: usize,
}

fn default_dt() -> f64 {
    0.001
}
fn default_t_max() -> f64 {
    100.0
}
fn default_output_stride() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Adiabatic-line slope for graph (a) and the occupancy audit.
    #[serde(default = "default_slope")]
    pub slope: f64,
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Optional reference-time marker for the graph-(c) outputs.
    pub t_ref: Option<f64>,
}

fn default_slope() -> f64 {
    1.5
}
fn default_margin() -> f64 {
    0.05
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            slope: default_slope(),
            margin: default_margin(),
            t_ref: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub cells: Vec<CellConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellConfig {
    pub name: Option<String>,
    pub potential: PotentialConfig,
    pub epsilon0: f64,
}
