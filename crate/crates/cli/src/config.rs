//! Run configuration: one TOML file with a shared `[model]` table and one
//! table per subcommand. Every key has a default; unknown keys are rejected.
//! Command-line flags take precedence over `seed` and `out` in the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use superdiff::boltzmann::{InitialDatum, KProfile, YProfile};
use superdiff::ModelParams;

use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub model: ModelConfig,
    pub tail: TailConfig,
    pub ctrw: CtrwConfig,
    pub fit: FitConfig,
    pub compare: CompareConfig,
    pub boltzmann: BoltzmannConfig,
    pub fracdiff: FracdiffConfig,
    pub chain: ChainConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub b: f64,
    pub gamma: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { b: 1.0, gamma: 1.0 }
    }
}

impl ModelConfig {
    pub fn params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(self.b, self.gamma)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailConfig {
    pub samples: usize,
    pub k_fraction: f64,
    pub plateau_lambdas: Vec<f64>,
    pub write_samples: bool,
}

impl Default for TailConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            k_fraction: 0.01,
            plateau_lambdas: vec![1e3, 1e4, 1e5],
            write_samples: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CtrwConfig {
    pub n_list: Vec<f64>,
    pub t_list: Vec<f64>,
    pub paths: usize,
    /// Fixed start `(start_k, start_branch)`; π-distributed starts when unset.
    pub start_k: Option<f64>,
    pub start_branch: u8,
}

impl Default for CtrwConfig {
    fn default() -> Self {
        Self {
            n_list: vec![1e3, 4e3],
            t_list: vec![1.0],
            paths: 10_000,
            start_k: None,
            start_branch: 2,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Endpoint CSV written by `ctrw`; defaults to `<out>/ctrw_endpoints.csv`.
    pub input: Option<PathBuf>,
    /// Defaults to the stable index of `[model]`.
    pub reference_exponent: Option<f64>,
    pub xi_points: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub n_scale: f64,
    pub t: f64,
    pub paths: usize,
    /// Diffusion constant of the fractional reference; required.
    pub d: Option<f64>,
    pub sigma: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub y_points: usize,
    pub half_length: f64,
    pub grid_points: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            n_scale: 1e4,
            t: 1.0,
            paths: 100_000,
            d: None,
            sigma: 1.0,
            y_min: -2.0,
            y_max: 2.0,
            y_points: 21,
            half_length: 3000.0,
            grid_points: 1 << 19,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSpec {
    pub k: f64,
    pub branch: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoltzmannConfig {
    pub n_scale: f64,
    pub t_list: Vec<f64>,
    pub paths: usize,
    pub y_list: Vec<f64>,
    /// Start states; an empty list selects the `k`-average.
    pub starts: Vec<StartSpec>,
    pub datum: InitialDatum,
}

impl Default for BoltzmannConfig {
    fn default() -> Self {
        Self {
            n_scale: 1e3,
            t_list: vec![0.5, 1.0],
            paths: 10_000,
            y_list: vec![-1.0, 0.0, 1.0],
            starts: Vec::new(),
            datum: InitialDatum {
                amplitude: 0.5,
                y: YProfile::Gaussian { center: 0.0, width: 1.0 },
                k: KProfile::Constant,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FracdiffConfig {
    pub d: f64,
    /// Defaults to half the stable index of `[model]`.
    pub s_half: Option<f64>,
    pub t_list: Vec<f64>,
    pub half_length: f64,
    pub grid_points: usize,
    pub center: f64,
    pub width: f64,
    pub mass: f64,
    pub y_out_max: f64,
    pub y_out_points: usize,
}

impl Default for FracdiffConfig {
    fn default() -> Self {
        Self {
            d: 1.0,
            s_half: None,
            t_list: vec![0.5, 1.0],
            half_length: 3000.0,
            grid_points: 1 << 19,
            center: 0.0,
            width: 1.0,
            mass: 1.0,
            y_out_max: 10.0,
            y_out_points: 201,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    pub n_sites: usize,
    pub epsilon: f64,
    pub dt: f64,
    pub t_macro: f64,
    pub ensemble: usize,
    /// Thermal start `T(y) = temperature·(1 + amplitude·exp(-y²/2w²))`.
    pub temperature: f64,
    pub modulation_amplitude: f64,
    pub modulation_width: f64,
    pub snapshots: usize,
    /// Gaussian widths `w` of the test functions `J(y, k) = exp(-y²/2w²)`.
    pub wigner_widths: Vec<f64>,
    /// Equal `k`-bins for the spectrum; 0 writes every mode.
    pub spectrum_bins: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            n_sites: 1024,
            epsilon: 0.1,
            dt: 0.01,
            t_macro: 1.0,
            ensemble: 16,
            temperature: 1.0,
            modulation_amplitude: 0.0,
            modulation_width: 1.0,
            snapshots: 10,
            wigner_widths: vec![1.0, 4.0],
            spectrum_bins: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Serialize a config fragment for provenance headers.
pub fn echo<T: Serialize>(value: &T) -> Result<String, CliError> {
    toml::to_string(value).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))
}
