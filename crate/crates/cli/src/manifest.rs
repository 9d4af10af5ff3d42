//! JSON run manifest. Written before any dataset and rewritten once the
//! run settles; contains no timestamps so reruns are byte-identical.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use wvdeflect_core::{EffectiveCoefficients, PhysicalSystem, RegimeReport};

use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Running,
    Complete,
    RegimeFailed,
    OracleFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: String,
    pub status: RunStatus,
    pub forced: bool,
    pub config_source: String,
    pub overrides: Vec<(String, String)>,
    pub parameters: PhysicalSystem,
    pub interaction_time: f64,
    pub coefficients: EffectiveCoefficients,
    pub regime: RegimeReport,
    pub summary: BTreeMap<String, f64>,
    pub oracle_gaps: BTreeMap<String, f64>,
    pub oracle_tolerance: Option<f64>,
    pub files: Vec<FileRecord>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Dataset(format!("serializing manifest: {e}")))?;
        text.push('\n');
        std::fs::write(&path, text)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
    }
}
