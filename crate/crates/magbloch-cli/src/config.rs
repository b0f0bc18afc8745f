//! Run configuration: JSON document with validated defaults.

use magbloch::error::{CoreError, Result};
use magbloch::model::GaussianTrial;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "d_gap")]
    pub gap: f64,
    #[serde(default = "d_trs")]
    pub trs: f64,
    #[serde(default = "d_flux")]
    pub flux: f64,
    #[serde(default = "d_int")]
    pub integer_residual: f64,
}

fn d_gap() -> f64 {
    1e-6
}
fn d_trs() -> f64 {
    1e-6
}
fn d_flux() -> f64 {
    1e-10
}
fn d_int() -> f64 {
    1e-3
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gap: d_gap(),
            trs: d_trs(),
            flux: d_flux(),
            integer_residual: d_int(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub model: Option<String>,
    pub pipeline: String,
    #[serde(default = "d_cutoff")]
    pub cutoff: i32,
    pub grid: Vec<usize>,
    /// lowest-m band selection; overridden by `band_list` when present
    #[serde(default = "d_bands")]
    pub bands: usize,
    #[serde(default)]
    pub band_list: Vec<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub trials: Vec<GaussianTrial>,
    /// nodes of the band path in reduced coordinates (`bands` pipeline)
    #[serde(default)]
    pub band_path: Vec<Vec<f64>>,
    #[serde(default = "d_path_points")]
    pub path_points: usize,
    #[serde(default = "d_band_count")]
    pub band_count: usize,
    /// supercell sizes for the tpuv pipeline
    #[serde(default)]
    pub supercells: Vec<usize>,
    #[serde(default)]
    pub real_resolution: Option<usize>,
    /// synthetic fixture mass parameter override
    #[serde(default)]
    pub m_param: Option<f64>,
}

fn d_cutoff() -> i32 {
    4
}
fn d_bands() -> usize {
    1
}
fn d_path_points() -> usize {
    24
}
fn d_band_count() -> usize {
    6
}

pub const PIPELINES: &[&str] = &["validate", "bands", "symmetry", "chern", "wannier", "tpuv"];

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig =
        serde_json::from_str(text).map_err(|e| CoreError::Config(format!("config: {e}")))?;
    validate(&cfg)?;
    Ok(cfg)
}

pub fn validate(cfg: &RunConfig) -> Result<()> {
    if !PIPELINES.contains(&cfg.pipeline.as_str()) {
        return Err(CoreError::Config(format!(
            "pipeline must be one of {PIPELINES:?}, got `{}`",
            cfg.pipeline
        )));
    }
    if cfg.cutoff < 1 {
        return Err(CoreError::Config("cutoff: N >= 1 required".into()));
    }
    if cfg.grid.is_empty() || cfg.grid.len() > 4 {
        return Err(CoreError::Config("grid: needs 1..4 axes".into()));
    }
    for (j, &n) in cfg.grid.iter().enumerate() {
        if n % 2 != 0 || n == 0 {
            return Err(CoreError::Config(format!("grid[{j}] = {n} must be even")));
        }
    }
    if cfg.bands == 0 {
        return Err(CoreError::Config("bands: m >= 1 required".into()));
    }
    let t = &cfg.tolerances;
    for (name, v) in [
        ("tolerances.gap", t.gap),
        ("tolerances.trs", t.trs),
        ("tolerances.flux", t.flux),
        ("tolerances.integer_residual", t.integer_residual),
    ] {
        if v <= 0.0 {
            return Err(CoreError::Config(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}
