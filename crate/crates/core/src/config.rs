//! Optional TOML configuration. Command-line flags override these values.
//!
//! ```toml
//! [parse]
//! ext = "java"
//! encoding = "utf-8"
//! exclude = ["**/generated/**"]
//!
//! [mi]
//! variant = "lines"
//!
//! [evolution]
//! delta_tdr = 0.02
//! delta_mi = 5.0
//! coverage = 0.5
//!
//! [[rule]]
//! id = "method-length"
//! threshold = 50
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::analysis::AnalysisOptions;
use crate::evolution::{DEFAULT_MI_DELTA, DEFAULT_TDR_DELTA};
use crate::mi::MiVariant;
use crate::sqale::{apply_overrides, builtin_rules, RuleOverride, SqaleError};

pub const DEFAULT_COVERAGE: f64 = 0.5;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Syntax {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("unknown MI variant `{0}` (expected statements or lines)")]
    Variant(String),
    #[error(transparent)]
    Rule(#[from] SqaleError),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParseSection {
    pub ext: Option<String>,
    pub encoding: Option<String>,
    #[serde(default)]
    pub exclude: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MiSection {
    pub variant: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    pub delta_tdr: Option<f64>,
    pub delta_mi: Option<f64>,
    pub coverage: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub parse: ParseSection,
    #[serde(default)]
    pub mi: MiSection,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default, rename = "rule")]
    pub rules: Vec<RuleOverride>,
}

pub fn parse_variant(text: &str) -> Result<MiVariant, ConfigError> {
    match text.to_ascii_lowercase().as_str() {
        "statements" | "stat" => Ok(MiVariant::Statements),
        "lines" | "loc" => Ok(MiVariant::Lines),
        _ => Err(ConfigError::Variant(text.to_string())),
    }
}

impl Config {
    pub fn from_str_at(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Syntax {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_str_at(&text, path)
    }

    pub fn analysis_options(&self) -> Result<AnalysisOptions, ConfigError> {
        let mut rules = builtin_rules();
        apply_overrides(&mut rules, &self.rules)?;
        let mi_variant = match &self.mi.variant {
            Some(v) => parse_variant(v)?,
            None => MiVariant::Statements,
        };
        Ok(AnalysisOptions { rules, mi_variant })
    }

    pub fn delta_tdr(&self) -> f64 {
        self.evolution.delta_tdr.unwrap_or(DEFAULT_TDR_DELTA)
    }

    pub fn delta_mi(&self) -> f64 {
        self.evolution.delta_mi.unwrap_or(DEFAULT_MI_DELTA)
    }

    pub fn coverage(&self) -> f64 {
        self.evolution.coverage.unwrap_or(DEFAULT_COVERAGE)
    }
}
