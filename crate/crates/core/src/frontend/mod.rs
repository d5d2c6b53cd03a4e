//! Source front-end: builds a [`Snapshot`] from a Java source tree or from a
//! code-facts JSON document written by any other front-end.

mod body;
pub mod lexer;
mod parser;
mod resolve;
mod syntax;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::model::Snapshot;

pub const FACTS_SCHEMA_VERSION: &str = "maintlens-facts/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub file: String,
    pub line: u32,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{}:{}: {severity}: {}", self.file, self.line, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Encoding {
    #[default]
    Utf8,
    Latin1,
}

impl FromStr for Encoding {
    type Err = FrontendError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "utf-8" | "utf8" => Ok(Encoding::Utf8),
            "latin-1" | "latin1" | "iso-8859-1" => Ok(Encoding::Latin1),
            _ => Err(FrontendError::UnknownEncoding(s.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// File extension without the dot.
    pub extension: String,
    pub encoding: Encoding,
    /// Globs matched against paths relative to the root.
    pub exclude: Vec<String>,
    /// Version label; defaults to the root's file name.
    pub label: Option<String>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            extension: "java".to_string(),
            encoding: Encoding::Utf8,
            exclude: Vec::new(),
            label: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("cannot read source root {path}: {source}")]
    UnreadableRoot {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported encoding `{0}` (expected utf-8 or latin-1)")]
    UnknownEncoding(String),
    #[error("invalid exclude pattern `{pattern}`: {message}")]
    BadExclude { pattern: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed facts document: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: unsupported facts schema_version `{found}` (expected `{FACTS_SCHEMA_VERSION}`)")]
    Schema { path: PathBuf, found: String },
    #[error("{path}: invalid snapshot: {message}")]
    Invalid { path: PathBuf, message: String },
}

fn exclude_set(patterns: &[String]) -> Result<GlobSet, FrontendError> {
    let mut builder = GlobSetBuilder::new();
    for pattern in patterns {
        let glob = Glob::new(pattern).map_err(|e| FrontendError::BadExclude {
            pattern: pattern.clone(),
            message: e.to_string(),
        })?;
        builder.add(glob);
    }
    builder.build().map_err(|e| FrontendError::BadExclude {
        pattern: patterns.join(","),
        message: e.to_string(),
    })
}

fn relative(path: &Path, root: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    let text = if rel.as_os_str().is_empty() {
        path.file_name().map(Path::new).unwrap_or(path).to_string_lossy()
    } else {
        rel.to_string_lossy()
    };
    text.replace('\\', "/")
}

fn decode(bytes: Vec<u8>, encoding: Encoding) -> Option<String> {
    match encoding {
        Encoding::Utf8 => String::from_utf8(bytes).ok(),
        Encoding::Latin1 => Some(bytes.into_iter().map(char::from).collect()),
    }
}

/// Parses every matching source file under `root`.
///
/// Files are parsed in parallel on the current rayon pool and merged in
/// path order, so the result does not depend on scheduling.
pub fn parse_tree(root: &Path, options: &ParseOptions) -> Result<(Snapshot, Vec<ParseDiagnostic>), FrontendError> {
    let meta = fs::metadata(root).map_err(|source| FrontendError::UnreadableRoot {
        path: root.to_path_buf(),
        source,
    })?;
    let excluded = exclude_set(&options.exclude)?;
    let mut files = Vec::new();
    if meta.is_file() {
        files.push(root.to_path_buf());
    } else {
        fs::read_dir(root).map_err(|source| FrontendError::UnreadableRoot {
            path: root.to_path_buf(),
            source,
        })?;
        for entry in WalkDir::new(root).sort_by_file_name() {
            let entry = entry.map_err(|e| FrontendError::UnreadableRoot {
                path: e.path().unwrap_or(root).to_path_buf(),
                source: e
                    .into_io_error()
                    .unwrap_or_else(|| std::io::Error::other("walk failed")),
            })?;
            let path = entry.path();
            if entry.file_type().is_file()
                && path.extension().is_some_and(|e| e == options.extension.as_str())
                && !excluded.is_match(relative(path, root))
            {
                files.push(path.to_path_buf());
            }
        }
    }
    files.sort_by_key(|p| relative(p, root));

    let parsed: Vec<parser::ParsedFile> = files
        .par_iter()
        .map(|path| {
            let rel = relative(path, root);
            let text = fs::read(path).ok().and_then(|b| decode(b, options.encoding));
            match text {
                Some(source) => parser::parse_file(&rel, &source),
                None => {
                    let mut failed = parser::parse_file(&rel, "");
                    failed.parsed = false;
                    failed.diagnostics.push(ParseDiagnostic {
                        severity: Severity::Error,
                        file: rel,
                        line: 0,
                        message: "file could not be read or decoded; file skipped".to_string(),
                    });
                    failed
                }
            }
        })
        .collect();

    let label = options.label.clone().unwrap_or_else(|| {
        let canonical = root.canonicalize().unwrap_or_else(|_| root.to_path_buf());
        canonical.file_name().map_or_else(
            || root.to_string_lossy().into_owned(),
            |n| n.to_string_lossy().into_owned(),
        )
    });
    let root_text = root.to_string_lossy().replace('\\', "/");
    resolve::assemble(parsed, &label, &root_text).map_err(|e| FrontendError::Invalid {
        path: root.to_path_buf(),
        message: e.to_string(),
    })
}

#[derive(Serialize)]
struct FactsOut<'a> {
    schema_version: &'a str,
    snapshot: &'a Snapshot,
}

#[derive(Deserialize)]
struct FactsIn {
    schema_version: serde_json::Value,
    snapshot: serde_json::Value,
}

/// Canonical JSON text of a snapshot, ending in a newline.
pub fn facts_to_string(snapshot: &Snapshot) -> String {
    let doc = FactsOut {
        schema_version: FACTS_SCHEMA_VERSION,
        snapshot,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("snapshot serialization cannot fail");
    text.push('\n');
    text
}

pub fn facts_from_str(text: &str, path: &Path) -> Result<Snapshot, FrontendError> {
    let doc: FactsIn = serde_json::from_str(text).map_err(|source| FrontendError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if doc.schema_version.as_str() != Some(FACTS_SCHEMA_VERSION) {
        let found = match &doc.schema_version {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        return Err(FrontendError::Schema {
            path: path.to_path_buf(),
            found,
        });
    }
    serde_json::from_value(doc.snapshot).map_err(|e| FrontendError::Invalid {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn load_facts(path: &Path) -> Result<Snapshot, FrontendError> {
    let text = fs::read_to_string(path).map_err(|source| FrontendError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    facts_from_str(&text, path)
}

pub fn save_facts(snapshot: &Snapshot, path: &Path) -> Result<(), FrontendError> {
    fs::write(path, facts_to_string(snapshot)).map_err(|source| FrontendError::Io {
        path: path.to_path_buf(),
        source,
    })
}
