use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use confcurv_core::analysis::{default_settings, growth_settings, DiagnosticsParams};
use confcurv_core::construct::{
    build_prescribed_growth, build_unbounded, Construction, ConstructionAParams, ConstructionBParams,
    GrowthTable,
};
use confcurv_core::quadrature::QuadSettings;
use confcurv_core::SolutionField;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = include_str!("../presets/config.schema.json");

const PRESETS: [(&str, &str); 4] = [
    ("unbounded-n3", include_str!("../presets/unbounded-n3.json")),
    ("unbounded-n4", include_str!("../presets/unbounded-n4.json")),
    ("growth-quadratic", include_str!("../presets/growth-quadratic.json")),
    ("growth-exp", include_str!("../presets/growth-exp.json")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstructionSpec {
    Unbounded(ConstructionAParams),
    PrescribedGrowth(ConstructionBParams),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Radii for the Pohozaev suite.
    #[serde(default = "Grids::default_r")]
    pub r_list: Vec<f64>,
    /// Radii for the volume-growth suite.
    #[serde(default = "Grids::default_volume_r")]
    pub volume_r_list: Vec<f64>,
    #[serde(default = "Grids::default_s")]
    pub s_grid: Vec<f64>,
    #[serde(default = "Grids::default_eps")]
    pub eps_grid: Vec<f64>,
}

impl Grids {
    fn default_r() -> Vec<f64> {
        vec![1.0, 5.0, 10.0]
    }
    fn default_volume_r() -> Vec<f64> {
        (2..=4).map(|k| (k as f64).exp()).collect()
    }
    fn default_s() -> Vec<f64> {
        vec![0.5, 1.5, 2.5]
    }
    fn default_eps() -> Vec<f64> {
        vec![0.05, 0.1, 0.2, 0.4]
    }
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            r_list: Self::default_r(),
            volume_r_list: Self::default_volume_r(),
            s_grid: Self::default_s(),
            eps_grid: Self::default_eps(),
        }
    }
}

/// Acceptance thresholds used by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Surface and volume Pohozaev forms must agree within this multiple of their error estimates.
    pub pohozaev_factor: f64,
    /// Absolute floor for the Pohozaev agreement.
    pub pohozaev_floor: f64,
    pub curvature_consistency: f64,
    pub cylinder_residual: f64,
    pub round_trip: f64,
    pub pohozaev_identity: f64,
    pub w_identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pohozaev_factor: 10.0,
            pohozaev_floor: 1e-9,
            curvature_consistency: 1e-10,
            cylinder_residual: 1e-6,
            round_trip: 1e-13,
            pohozaev_identity: 1e-5,
            w_identity: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub construction: ConstructionSpec,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub diagnostics: DiagnosticsParams,
}

/// Raised for malformed input; maps to exit code 2 together with I/O errors.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn validate_schema(doc: &Value) -> Result<()> {
    let schema: Value = serde_json::from_str(SCHEMA).expect("embedded schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("embedded schema compiles");
    let problems: Vec<String> = validator
        .iter_errors(doc)
        .map(|e| {
            let path = e.instance_path().to_string();
            format!("{}: {e}", if path.is_empty() { "/" } else { &path })
        })
        .collect();
    if !problems.is_empty() {
        bail!(ConfigError(format!("config does not match schema\n  {}", problems.join("\n  "))));
    }
    Ok(())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Value =
            serde_json::from_str(text).map_err(|e| ConfigError(format!("config is not valid JSON: {e}")))?;
        validate_schema(&doc)?;
        let cfg: RunConfig =
            serde_json::from_value(doc).map_err(|e| ConfigError(format!("config rejected: {e}")))?;
        Ok(cfg)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            ConfigError(format!("unknown preset `{name}` (available: {})", preset_names().join(", ")))
        })?;
        Self::parse(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn build(&self) -> Result<Construction> {
        let built = match &self.construction {
            ConstructionSpec::Unbounded(p) => build_unbounded(p),
            ConstructionSpec::PrescribedGrowth(p) => build_prescribed_growth(p),
        };
        built.map_err(|e| anyhow!(ConfigError(format!("construction failed: {e}"))))
    }

    pub fn phi(&self) -> Option<&GrowthTable> {
        match &self.construction {
            ConstructionSpec::PrescribedGrowth(p) => Some(&p.phi),
            ConstructionSpec::Unbounded(_) => None,
        }
    }

    fn apply(&self, mut s: QuadSettings) -> QuadSettings {
        if let Some(r) = self.quadrature.rtol {
            s.rtol = r;
        }
        if let Some(a) = self.quadrature.atol {
            s.atol = a;
        }
        s
    }

    pub fn settings(&self, field: &SolutionField) -> QuadSettings {
        self.apply(default_settings(field))
    }

    /// Volume integrals never run tighter than the growth default unless asked to.
    pub fn volume_settings(&self, field: &SolutionField) -> QuadSettings {
        self.apply(growth_settings(field))
    }
}
