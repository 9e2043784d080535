//! Per-command configuration records, JSON loading with positioned
//! diagnostics, and the content hash embedded in every output.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use ssflab::asymptotics::Boundary;
use ssflab::effective::{Domain3D, GridSpec};
use ssflab::geometry::PlanarSet;
use ssflab::resolvent::{Cutoff1D, KernelVariant};
use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapacityConfig {
    pub geometry: Option<PlanarSet>,
    pub n_schedule: Vec<usize>,
    pub seed: u64,
    pub starts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        CapacityConfig { geometry: None, n_schedule: vec![50, 100, 200], seed: 20_240_521, starts: 3, max_iter: 400, tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToeplitzConfig {
    pub geometry: Option<PlanarSet>,
    pub q: usize,
    pub b: f64,
    pub k_max: usize,
    pub abs_tol: f64,
    pub margin: usize,
    /// Capacity for the residual column; estimated from Fekete points when absent.
    pub cap: Option<f64>,
    pub cap_schedule: Vec<usize>,
    pub seed: u64,
}

impl Default for ToeplitzConfig {
    fn default() -> Self {
        ToeplitzConfig {
            geometry: None,
            q: 0,
            b: 2.0,
            k_max: 40,
            abs_tol: 1e-13,
            margin: 20,
            cap: None,
            cap_schedule: vec![50, 100, 200],
            seed: 20_240_521,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SsfConfig {
    pub obstacle: Option<Domain3D>,
    pub cap: Option<f64>,
    pub b: f64,
    pub q: usize,
    pub boundary: Boundary,
    pub ln_lambda: Vec<f64>,
    pub n_schedule: Vec<usize>,
    pub seed: u64,
}

impl Default for SsfConfig {
    fn default() -> Self {
        SsfConfig {
            obstacle: None,
            cap: None,
            b: 1.0,
            q: 0,
            boundary: Boundary::Dirichlet,
            ln_lambda: vec![-1e2, -1e3, -1e4],
            n_schedule: vec![50, 100, 200],
            seed: 20_240_521,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub suite: String,
    pub seed: u64,
    /// Overrides every suite's default instance count.
    pub instances: Option<usize>,
    /// Overrides every agreement suite's default tolerance.
    pub tol: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { suite: String::new(), seed: 42, instances: None, tol: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianCutoff {
    pub amplitude: f64,
    pub s_perp: f64,
    pub s_par: f64,
    pub center: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EffectiveConfig {
    pub q: usize,
    pub b: f64,
    pub cutoff: GaussianCutoff,
    pub grid: GridSpec,
    /// Adds a shadow column for this obstacle.
    pub obstacle: Option<Domain3D>,
    /// Size of the form comparison; skipped when absent.
    pub k_check: Option<usize>,
    pub seed: u64,
}

impl Default for EffectiveConfig {
    fn default() -> Self {
        EffectiveConfig {
            q: 0,
            b: 1.0,
            cutoff: GaussianCutoff { amplitude: 1.0, s_perp: 1.0, s_par: 1.0, center: [0.0, 0.0] },
            grid: GridSpec { n_perp: 96, ..GridSpec::default() },
            obstacle: None,
            k_check: None,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResolventConfig {
    pub cutoff: Cutoff1D,
    pub variant: KernelVariant,
    pub energies: Vec<f64>,
    pub abs_tol: f64,
}

impl Default for ResolventConfig {
    fn default() -> Self {
        ResolventConfig {
            cutoff: Cutoff1D::Gaussian { center: 0.0, width: 1.0 },
            variant: KernelVariant::Plain,
            energies: vec![-4.0, -1.0, -0.25, 0.25, 1.0, 4.0],
            abs_tol: 1e-13,
        }
    }
}

fn parse_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Parse(format!("{}:{}:{}: {}", path.display(), e.line(), e.column(), e))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Parse a JSON file. A file whose first line is an output header
/// (`# {...}`) yields the `config` recorded there, so outputs re-run.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    if let Some(rest) = text.strip_prefix('#') {
        let line = rest.lines().next().unwrap_or("");
        let header: serde_json::Value = serde_json::from_str(line).map_err(|e| parse_error(path, e))?;
        let cfg = header
            .get("config")
            .cloned()
            .ok_or_else(|| CliError::Parse(format!("{}:1:1: header has no config field", path.display())))?;
        return serde_json::from_value(cfg).map_err(|e| CliError::Parse(format!("{}: header config: {e}", path.display())));
    }
    serde_json::from_str(&text).map_err(|e| parse_error(path, e))
}

/// Lowercase hex SHA-256 of the compact JSON form.
pub fn content_hash<T: Serialize>(cfg: &T) -> String {
    let json = serde_json::to_string(cfg).expect("configs serialize");
    let digest = Sha256::digest(json.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest.iter() {
        write!(out, "{byte:02x}").unwrap();
    }
    out
}
