//! Workspace configuration and output-path plumbing.
//!
//! The workspace directory is the current directory unless LPQC_WORKDIR
//! points elsewhere. A `workspace.json` in that directory supplies
//! defaults; command-line flags override it field by field. Outputs with
//! no explicit path land in the configured output directory, resolved
//! against the workspace directory.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use lpqc::distance::{DEFAULT_ESTIMATE_ITERATIONS, DEFAULT_EXACT_BUDGET};

pub const CONFIG_FILE: &str = "workspace.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkspaceConfig {
    pub output_dir: PathBuf,
    /// Operation budget for exact quantum-distance searches.
    pub exact_budget: u64,
    /// Iteration count for randomized distance estimates.
    pub estimate_iterations: u64,
    /// Worker threads; 0 keeps the library default.
    pub jobs: usize,
    pub seed: u64,
}

impl Default for WorkspaceConfig {
    fn default() -> Self {
        WorkspaceConfig {
            output_dir: PathBuf::from("."),
            exact_budget: DEFAULT_EXACT_BUDGET,
            estimate_iterations: DEFAULT_ESTIMATE_ITERATIONS,
            jobs: 0,
            seed: 0,
        }
    }
}

pub fn workspace_dir() -> PathBuf {
    env::var_os("LPQC_WORKDIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

impl WorkspaceConfig {
    /// Reads the explicit config path, or the workspace default when it
    /// exists; otherwise built-in defaults. An explicit path must exist.
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None => {
                let p = workspace_dir().join(CONFIG_FILE);
                if !p.exists() {
                    return Ok(WorkspaceConfig::default());
                }
                p
            }
        };
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Explicit path wins; otherwise `default_name` inside the output
    /// directory. Components normalizes stray `.` segments away.
    pub fn resolve_out(&self, explicit: Option<PathBuf>, default_name: &str) -> PathBuf {
        explicit.unwrap_or_else(|| {
            workspace_dir()
                .join(&self.output_dir)
                .join(default_name)
                .components()
                .collect()
        })
    }
}

/// Pretty JSON with a trailing newline; field order follows the struct,
/// so identical values serialize to identical bytes.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn write_output(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_losslessly() {
        let cfg = WorkspaceConfig {
            output_dir: PathBuf::from("runs/out"),
            exact_budget: 123,
            estimate_iterations: 456,
            jobs: 3,
            seed: 7,
        };
        let text = to_json(&cfg).unwrap();
        let back: WorkspaceConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn missing_fields_take_defaults_and_unknown_fields_fail() {
        let cfg: WorkspaceConfig = serde_json::from_str(r#"{"seed": 9}"#).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.exact_budget, DEFAULT_EXACT_BUDGET);
        assert!(serde_json::from_str::<WorkspaceConfig>(r#"{"sed": 9}"#).is_err());
    }

    #[test]
    fn explicit_out_path_wins() {
        let cfg = WorkspaceConfig::default();
        assert_eq!(
            cfg.resolve_out(Some(PathBuf::from("x/y.json")), "z.json"),
            PathBuf::from("x/y.json")
        );
    }
}
