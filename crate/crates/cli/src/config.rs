//! Optional TOML config file. Every key mirrors a command-line flag, and
//! flags win.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use stratmap::rate::parse_rate;
use stratmap::Rate;

use crate::error::CliError;

/// A rate written either as a string (`"3/5"`, `"0.6"`) or a bare number.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RateValue {
    Text(String),
    Number(f64),
}

impl RateValue {
    pub fn to_rate(&self) -> Result<Rate, CliError> {
        let text = match self {
            RateValue::Text(t) => t.clone(),
            RateValue::Number(n) => n.to_string(),
        };
        parse_rate(&text).map_err(|e| CliError::config(e.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub km: Option<PathBuf>,
    #[serde(default)]
    pub logs: Vec<PathBuf>,
    pub format: Option<String>,
    #[serde(default)]
    pub core: Vec<String>,
    pub k_depth: Option<usize>,
    pub threshold: Option<RateValue>,
    pub minsup: Option<RateValue>,
    pub question: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub learners: Option<usize>,
    pub mix: Option<String>,
    pub interleave: Option<f64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("reading config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let c = FileConfig::parse(
            r#"
            km = "map.json"
            logs = ["a.csv", "b.csv"]
            core = ["array", "pointer"]
            k_depth = 3
            threshold = "3/5"
            minsup = 0.25
            seed = 9
            "#,
        )
        .unwrap();
        assert_eq!(c.logs.len(), 2);
        assert_eq!(c.threshold.unwrap().to_rate().unwrap(), Rate::new(3, 5));
        assert_eq!(c.minsup.unwrap().to_rate().unwrap(), Rate::new(1, 4));
        assert_eq!(c.k_depth, Some(3));
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let err = FileConfig::parse("kdepth = 2").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
