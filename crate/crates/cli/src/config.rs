use std::path::{Path, PathBuf};

use binormal_core::pipeline::PipelineConfig;
use binormal_core::singularity::AnalysisOptions;
use binormal_core::wave_operator::{DuhamelOptions, PicardOptions};
use binormal_core::{Family, Sign};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Selfsimilar,
    Scatter,
    Reconstruct,
    Singularity,
    FullPipeline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub selfsimilar: SelfSimilarParams,
    #[serde(default)]
    pub scatter: ScatterParams,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub analysis: AnalysisParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfSimilarParams {
    pub amplitudes: Vec<f64>,
    pub times: Vec<f64>,
    /// Profile rows written per amplitude.
    pub profile_rows: usize,
}

impl Default for SelfSimilarParams {
    fn default() -> Self {
        Self { amplitudes: vec![0.25, 0.5, 0.75, 1.0], times: vec![0.01, 0.1, 1.0], profile_rows: 2001 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterParams {
    pub a: f64,
    pub sign: Sign,
    pub half_width: f64,
    pub points: usize,
    pub u_plus: Family,
    pub t0: f64,
    pub t_max: f64,
    pub fit_from: f64,
    pub fit_to: f64,
    /// Enforce the zero-mode rule for `u₊`.
    pub require_hdot_minus2: bool,
    pub picard: PicardOptions,
    pub duhamel: DuhamelOptions,
}

impl Default for ScatterParams {
    fn default() -> Self {
        Self {
            a: 0.1,
            sign: Sign::Focusing,
            half_width: 32768.0,
            points: 16384,
            u_plus: Family::GaussianDerivative { amplitude: 3.0, width: 8.0, order: 2 },
            t0: 1.0,
            t_max: 2000.0,
            fit_from: 10.0,
            fit_to: 1000.0,
            require_hdot_minus2: true,
            picard: PicardOptions::default(),
            duhamel: DuhamelOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisParams {
    pub regime_split: f64,
    /// Positive magnitudes of the dyadic ladder.
    pub ladder: Vec<f64>,
    pub trace_step: f64,
    /// Pass threshold for `sup ε_meas`.
    pub eps_target: f64,
    /// Residual window `|x| ≤ w` for the binormal residual.
    pub residual_window: f64,
    /// Parabolic cap `|x| ≤ R√t` on the residual window.
    pub residual_radius: f64,
    /// Absolute floor added to the inner-regime bound.
    pub bound_floor: f64,
    /// Rows per exported slice curve.
    pub curve_rows: usize,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        let o = AnalysisOptions::default();
        Self {
            regime_split: o.regime_split,
            ladder: o.ladder,
            trace_step: o.trace_step,
            eps_target: 0.05,
            residual_window: 1.0,
            residual_radius: 4.0,
            bound_floor: 1e-5,
            curve_rows: 2001,
        }
    }
}

impl AnalysisParams {
    pub fn options(&self) -> AnalysisOptions {
        AnalysisOptions { regime_split: self.regime_split, ladder: self.ladder.clone(), trace_step: self.trace_step }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Parse(String),
    Invalid(Vec<String>),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse(m) => write!(f, "cannot parse config: {m}"),
            ConfigError::Invalid(v) => write!(f, "invalid config: {}", v.join("; ")),
        }
    }
}

pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(ConfigError::Invalid(vec![format!(
            "schema_version {} unsupported (expected {SCHEMA_VERSION})",
            cfg.schema_version
        )]));
    }
    Ok(cfg)
}

/// SHA-256 of the canonical JSON form with the output directory removed.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = ExperimentConfig { output_dir: None, ..cfg.clone() };
    hex(&Sha256::digest(serde_json::to_vec(&canonical).expect("config serializes")))
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
