//! Run configuration and the reproducibility manifest written next to every output.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use smoothzeta::quad::QuadratureConfig;
use smoothzeta::zeta::DetectionConfig;

use crate::spec::{sha256_hex, SpecError, SpecFile};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "SMOOTHZETA_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionSettings {
    pub radius: f64,
    pub nodes: usize,
    pub cell_width: f64,
    pub im_cuts: Vec<f64>,
    pub edge_nodes: usize,
    pub residue_threshold: f64,
    pub order_tolerance: f64,
    pub match_distance: f64,
}

impl Default for DetectionSettings {
    fn default() -> Self {
        let d = DetectionConfig::default();
        Self {
            radius: d.radius,
            nodes: d.nodes,
            cell_width: d.cell_width,
            im_cuts: d.im_cuts,
            edge_nodes: d.edge_nodes,
            residue_threshold: d.residue_threshold,
            order_tolerance: d.order_tolerance,
            match_distance: d.match_distance,
        }
    }
}

impl From<&DetectionSettings> for DetectionConfig {
    fn from(d: &DetectionSettings) -> Self {
        DetectionConfig {
            radius: d.radius,
            nodes: d.nodes,
            cell_width: d.cell_width,
            im_cuts: d.im_cuts.clone(),
            edge_nodes: d.edge_nodes,
            residue_threshold: d.residue_threshold,
            order_tolerance: d.order_tolerance,
            match_distance: d.match_distance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationSettings {
    /// Points per parallel batch.
    pub chunk: usize,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        Self { chunk: 256 }
    }
}

/// Contents of the config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub quadrature: QuadratureConfig,
    pub detection: DetectionSettings,
    pub continuation: ContinuationSettings,
}

/// Where the config came from, for the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadedConfig {
    pub source: Option<String>,
    pub config: RunConfig,
}

/// Read the config from `explicit`, else from `$SMOOTHZETA_CONFIG`, else defaults.
pub fn load_config(explicit: Option<&Path>) -> Result<LoadedConfig, SpecError> {
    let path: Option<PathBuf> = explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    let Some(path) = path else {
        return Ok(LoadedConfig {
            source: None,
            config: RunConfig::default(),
        });
    };
    let p = path.display().to_string();
    let text = std::fs::read_to_string(&path).map_err(|source| SpecError::Io {
        path: p.clone(),
        source,
    })?;
    let config = toml::from_str(&text).map_err(|e| SpecError::Schema {
        path: p.clone(),
        message: e.to_string(),
    })?;
    Ok(LoadedConfig {
        source: Some(p),
        config,
    })
}

/// Target and achieved error of one stage of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTolerance {
    pub stage: String,
    pub target: f64,
    pub achieved: f64,
    pub met: bool,
}

impl StageTolerance {
    /// A non-finite `achieved` is recorded as `f64::MAX` so the manifest stays valid JSON.
    pub fn new(stage: &str, target: f64, achieved: f64) -> Self {
        let achieved = if achieved.is_finite() { achieved } else { f64::MAX };
        Self {
            stage: stage.into(),
            target,
            achieved,
            met: achieved <= target,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub args: Vec<String>,
    pub spec_path: Option<String>,
    pub spec_sha256: Option<String>,
    /// The normalized spec the run used.
    pub spec: Option<SpecFile>,
    /// Effective configuration, after spec overrides.
    pub config: LoadedConfig,
    pub notices: Vec<String>,
    pub wall_time_s: f64,
    pub stages: Vec<StageTolerance>,
    pub output: Option<String>,
    pub output_sha256: Option<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, args: Vec<String>, config: LoadedConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            args,
            spec_path: None,
            spec_sha256: None,
            spec: None,
            config,
            notices: Vec::new(),
            wall_time_s: 0.0,
            stages: Vec::new(),
            output: None,
            output_sha256: None,
        }
    }

    pub fn record_output(&mut self, path: &Path, bytes: &[u8]) {
        self.output = Some(path.display().to_string());
        self.output_sha256 = Some(sha256_hex(bytes));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest is plain data")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// `out.csv` → `out.csv.manifest.json`.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
