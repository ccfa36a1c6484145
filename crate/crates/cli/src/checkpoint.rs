//! JSON checkpoint of a trained vector field.
//!
//! ```json
//! {
//!   "format": "lieflow-checkpoint",
//!   "version": 1,
//!   "group": "se2",
//!   "encoding": "se2:xy-cos-sin",
//!   "source": "hline",
//!   "target": "vline",
//!   "activation": "silu",
//!   "sizes": [5, 64, 64, 64, 64, 3],
//!   "params": [...]
//! }
//! ```
//!
//! `params` holds each layer's weights (input-major, `sizes[l] x sizes[l+1]`)
//! followed by its biases. Loading refuses any other format tag or version,
//! and any group or encoding that disagrees with the caller's.

use std::fs;
use std::path::Path;

use lieflow_core::mlp::{Activation, VectorFieldNet};
use lieflow_core::{Group, LieGroup};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const FORMAT: &str = "lieflow-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub group: String,
    pub encoding: String,
    /// Distribution ids the field was trained between.
    pub source: Option<String>,
    pub target: Option<String>,
    pub activation: Activation,
    pub sizes: Vec<usize>,
    pub params: Vec<f64>,
}

impl Checkpoint {
    pub fn new(group: &Group, net: &VectorFieldNet, source: Option<&str>, target: Option<&str>) -> Self {
        Self {
            format: FORMAT.to_string(),
            version: VERSION,
            group: group.name(),
            encoding: group.encoding(),
            source: source.map(str::to_string),
            target: target.map(str::to_string),
            activation: net.activation(),
            sizes: net.sizes().to_vec(),
            params: net.params().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    /// Parses and validates a checkpoint; `path` only labels errors.
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let err = |message: String| CliError::File { path: path.to_path_buf(), message };
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
        match value.get("format").and_then(|f| f.as_str()) {
            Some(FORMAT) => {}
            other => return Err(err(format!("not a {FORMAT} file (format tag {other:?})"))),
        }
        match value.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(VERSION) => {}
            other => return Err(err(format!("unsupported version {other:?}, expected {VERSION}"))),
        }
        let ckpt: Checkpoint = serde_json::from_value(value).map_err(|e| err(e.to_string()))?;
        let group = Group::from_id(&ckpt.group).map_err(|e| err(e.to_string()))?;
        if group.encoding() != ckpt.encoding {
            return Err(err(format!("encoding `{}` does not match group {} (`{}`)", ckpt.encoding, ckpt.group, group.encoding())));
        }
        let (first, last) = (ckpt.sizes.first().copied(), ckpt.sizes.last().copied());
        if first != Some(group.feature_dim() + 1) || last != Some(group.dim()) {
            return Err(err(format!("layer sizes {:?} do not fit group {}", ckpt.sizes, ckpt.group)));
        }
        ckpt.net().map_err(|e| err(e.to_string()))?;
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }

    /// Loads a checkpoint and refuses it unless it was trained on `group`.
    pub fn load_for(path: &Path, group: &Group) -> Result<Self> {
        let ckpt = Self::load(path)?;
        if ckpt.group != group.name() || ckpt.encoding != group.encoding() {
            return Err(CliError::File {
                path: path.to_path_buf(),
                message: format!("trained on {} ({}), refusing to use it for {} ({})", ckpt.group, ckpt.encoding, group.name(), group.encoding()),
            });
        }
        Ok(ckpt)
    }

    pub fn group(&self) -> Group {
        Group::from_id(&self.group).expect("validated on load")
    }

    pub fn net(&self) -> lieflow_core::Result<VectorFieldNet> {
        VectorFieldNet::from_parts(self.sizes.clone(), self.activation, self.params.clone())
    }
}
