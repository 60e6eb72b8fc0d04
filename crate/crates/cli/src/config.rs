//! Run configuration files.
//!
//! ```toml
//! workflow_path = "w3.xml"
//! instance_table_path = "w3.csv"
//! output_dir = "runs"
//! # run_id = "w3-fixed"        # optional; defaults to <UTC timestamp>-seed<seed>
//!
//! [algorithm]
//! algorithm = "nsga2"           # or "nsga3"
//! population_size = 20
//! generations = 30
//! seed = 1
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use adaptopt_core::moea::AlgorithmConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub workflow_path: PathBuf,
    pub instance_table_path: PathBuf,
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_id: Option<String>,
    pub algorithm: AlgorithmConfig,
}

impl RunConfig {
    /// Parses `path`, resolves relative paths and checks that the inputs exist.
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.workflow_path, &mut cfg.instance_table_path, &mut cfg.output_dir] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        for (what, p) in [("workflow_path", &cfg.workflow_path), ("instance_table_path", &cfg.instance_table_path)] {
            if !p.is_file() {
                return Err(CliError::Config(format!("{what} '{}' does not exist", p.display())));
            }
        }
        if let Some(id) = &cfg.run_id {
            if !is_valid_run_id(id) {
                return Err(CliError::Config(format!(
                    "run_id '{id}' may only contain ASCII letters, digits, '.', '_' and '-'"
                )));
            }
        }
        cfg.algorithm.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// The pinned id, or `<UTC timestamp>-seed<seed>`.
    pub fn resolve_run_id(&self) -> String {
        self.run_id.clone().unwrap_or_else(|| {
            format!(
                "{}-seed{}",
                chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ"),
                self.algorithm.seed
            )
        })
    }
}

/// Run ids double as directory names, so they are restricted to a safe alphabet.
pub fn is_valid_run_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}
