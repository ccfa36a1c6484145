//! JSON evaluation report.

use std::fs;
use std::path::Path;

use lieflow_core::eval::{EvalReport, PermutationTest};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const FORMAT: &str = "lieflow-report";
pub const VERSION: u32 = 1;

/// Endpoint metrics of one flow run against a fresh target batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: String,
    pub version: u32,
    pub group: String,
    /// Source distribution id, or the trajectory CSV the endpoints came from.
    pub source: Option<String>,
    pub input: Option<String>,
    pub target: String,
    pub flow_steps: Option<usize>,
    pub seed: u64,
    pub metrics: EvalReport,
    pub permutation_test: PermutationTest,
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let report: ReportFile = serde_json::from_str(text).map_err(|e| CliError::File { path: path.to_path_buf(), message: e.to_string() })?;
        if report.format != FORMAT || report.version != VERSION {
            return Err(CliError::File {
                path: path.to_path_buf(),
                message: format!("not a {FORMAT} v{VERSION} file"),
            });
        }
        Ok(report)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }
}
