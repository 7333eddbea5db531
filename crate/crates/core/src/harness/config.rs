use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classical::{LyapunovOptions, MapVariant, DEFAULT_GRID_POINTS, DEFAULT_H_TOL, DEFAULT_PERIODS, DEFAULT_TRANSIENT};
use crate::liouville::{Sector, DEFAULT_EPSILON};
use crate::spin::Spin;
use crate::{Error, Result};

/// Largest spin a quantum sweep accepts without `allow_large_j`.
pub const MAX_DESK_J: f64 = 40.0;

/// Environment variable that overrides `workers`.
pub const WORKERS_ENV: &str = "KICKTOP_WORKERS";

/// Default spacing of generated `k1` grids.
pub const DEFAULT_K1_STEP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axes {
    pub p: Vec<f64>,
    pub k0: Vec<f64>,
    pub k1: Vec<f64>,
    pub gamma: Vec<f64>,
    pub j: Vec<f64>,
}

impl Default for Axes {
    fn default() -> Self {
        Axes { p: vec![2.0], k0: vec![10.0], k1: k1_grid(0.0, 8.0, DEFAULT_K1_STEP), gamma: vec![0.1], j: vec![10.0] }
    }
}

/// `start, start + step, ...` up to and including `stop` (within rounding).
pub fn k1_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return vec![start];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantumOptions {
    pub run: bool,
    pub sector: Sector,
    pub epsilon: f64,
}

impl Default for QuantumOptions {
    fn default() -> Self {
        QuantumOptions { run: true, sector: Sector::Positive, epsilon: DEFAULT_EPSILON }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalOptions {
    pub run: bool,
    pub n_ic: usize,
    pub n_periods: usize,
    pub transient: usize,
    pub h_tol: f64,
    pub variant: MapVariant,
}

impl Default for ClassicalOptions {
    fn default() -> Self {
        ClassicalOptions {
            run: true,
            n_ic: DEFAULT_GRID_POINTS,
            n_periods: DEFAULT_PERIODS,
            transient: DEFAULT_TRANSIENT,
            h_tol: DEFAULT_H_TOL,
            variant: MapVariant::Coupled,
        }
    }
}

impl ClassicalOptions {
    pub fn lyapunov(&self) -> LyapunovOptions {
        LyapunovOptions {
            n_periods: self.n_periods,
            transient: self.transient,
            variant: self.variant,
            h_tol: self.h_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// CSV tables plus a JSON summary.
    #[default]
    Csv,
    /// JSON summary only.
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputOptions {
    pub directory: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions { directory: PathBuf::from("kicktop-out"), format: OutputFormat::Csv }
    }
}

/// A full sweep description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Permits quantum sweeps above [`MAX_DESK_J`].
    #[serde(default)]
    pub allow_large_j: bool,
    #[serde(default)]
    pub axes: Axes,
    #[serde(default)]
    pub quantum: QuantumOptions,
    #[serde(default)]
    pub classical: ClassicalOptions,
    #[serde(default)]
    pub output: OutputOptions,
}

fn default_workers() -> usize {
    1
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            seed: 0,
            workers: default_workers(),
            allow_large_j: false,
            axes: Axes::default(),
            quantum: QuantumOptions::default(),
            classical: ClassicalOptions::default(),
            output: OutputOptions::default(),
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: SweepConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical TOML form, hex encoded. Worker count and
    /// output location do not change results and are left out.
    pub fn hash(&self) -> Result<String> {
        let canonical = SweepConfig { workers: default_workers(), output: OutputOptions::default(), ..self.clone() };
        let digest = Sha256::digest(canonical.to_toml_string()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn validate(&self) -> Result<()> {
        let axes = [
            ("p", &self.axes.p),
            ("k0", &self.axes.k0),
            ("k1", &self.axes.k1),
            ("gamma", &self.axes.gamma),
            ("j", &self.axes.j),
        ];
        for (name, values) in axes {
            if values.is_empty() {
                return Err(Error::Config(format!("axis {name} is empty")));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("axis {name} has a non-finite value")));
            }
        }
        if self.axes.gamma.iter().any(|g| *g < 0.0) {
            return Err(Error::Config("gamma must be non-negative".into()));
        }
        for &j in &self.axes.j {
            Spin::new(j).map_err(|e| Error::Config(e.to_string()))?;
            if self.quantum.run && j > MAX_DESK_J && !self.allow_large_j {
                return Err(Error::Config(format!(
                    "j = {j} exceeds the dense-matrix ceiling {MAX_DESK_J}; set allow_large_j to force it"
                )));
            }
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if !(self.quantum.epsilon > 0.0) {
            return Err(Error::Config("quantum.epsilon must be positive".into()));
        }
        if self.classical.n_ic == 0 {
            return Err(Error::Config("classical.n_ic must be positive".into()));
        }
        self.classical.lyapunov().validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// `workers`, unless [`WORKERS_ENV`] holds a positive integer.
    pub fn effective_workers(&self) -> usize {
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or(self.workers)
    }
}
