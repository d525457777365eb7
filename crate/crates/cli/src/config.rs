//! Optional JSON settings file. Command-line flags and environment
//! variables override anything set here.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub base_url: Option<String>,
    pub api_key: Option<String>,
    pub model: Option<String>,
    pub prover9_path: Option<PathBuf>,
    pub workers: Option<usize>,
    pub strategy: Option<String>,
    pub engine: Option<String>,
    pub timeout_secs: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"modle": "x"}"#).is_err());
        let c: FileConfig = serde_json::from_str(r#"{"model": "m", "workers": 2}"#).unwrap();
        assert_eq!(c.model.as_deref(), Some("m"));
        assert_eq!(c.workers, Some(2));
    }

    #[test]
    fn no_path_means_defaults() {
        assert!(FileConfig::load(None).unwrap().model.is_none());
    }
}
