//! JSON metadata sidecars. Every file-producing subcommand writes one next
//! to its outputs; the recorded `command` array replays the exact
//! invocation (paths are as given on the command line).

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Argv (without the program name) sufficient to re-run this
    /// invocation.
    pub command: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Fully resolved parameters, including values derived at runtime
    /// (for example a quantile-selected t).
    pub params: serde_json::Value,
}

impl Sidecar {
    pub fn new(subcommand: &str, argv: &[String]) -> Self {
        Self {
            tool: "pfk".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            command: argv.to_vec(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            params: serde_json::Value::Null,
        }
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn params<T: Serialize>(mut self, params: &T) -> Result<Self> {
        self.params = serde_json::to_value(params)?;
        Ok(self)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n")
            .with_context(|| format!("writing sidecar {}", path.display()))
    }
}

/// `<prefix>.json` next to the outputs named by `prefix`.
pub fn sidecar_path(prefix: &Path) -> PathBuf {
    let mut os = prefix.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

/// `<prefix>.<ext>` without replacing existing extension-like suffixes.
pub fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut os = prefix.as_os_str().to_owned();
    os.push(suffix);
    PathBuf::from(os)
}
