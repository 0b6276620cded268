//! Dynamic analysis: run an install/import probe for a package and mine its
//! output for names of missing dependencies.

use std::process::Command;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::package::PackageKey;

/// Error-log phrases that precede the name of a missing dependency.
pub const LOG_PATTERNS: [&str; 4] = [
    "no module named",
    "pip install",
    "cannot find",
    "cannot import name",
];

/// Placeholder substituted with the package name in probe command templates.
pub const PACKAGE_PLACEHOLDER: &str = "{package}";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicDependencyRecord {
    pub package: PackageKey,
    pub required_resource: String,
}

/// One captured probe run, as stored in probe-log JSON lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeOutput {
    pub package: String,
    pub version: String,
    pub log: String,
}

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("cannot parse probe template {template:?}: {reason}")]
    Template { template: String, reason: String },
    #[error("failed to spawn `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')
}

/// Extracts the token following `at`: surrounding whitespace and quotes are
/// skipped, the name runs over `[A-Za-z0-9_.-]`, and trailing `.`/`,` are cut.
fn token_after(text: &str, at: usize) -> Option<&str> {
    let rest = &text[at..];
    // the phrase must end at a word boundary
    let first = rest.chars().next()?;
    if !first.is_whitespace() {
        return None;
    }
    let rest = rest.trim_start().trim_start_matches(['\'', '"', '`']);
    let end = rest.find(|c: char| !is_name_char(c)).unwrap_or(rest.len());
    let token = rest[..end]
        .trim_end_matches(['.', ','])
        .trim_start_matches('.');
    if token.is_empty() || token.starts_with('-') {
        None
    } else {
        Some(token)
    }
}

/// Scans a probe log for the known failure phrases (case-insensitively) and
/// returns one record per distinct missing name, in order of first mention.
pub fn parse_dependency_log(log: &str, subject: &PackageKey) -> Vec<DynamicDependencyRecord> {
    let lowered = log.to_ascii_lowercase();
    let mut hits: Vec<(usize, &str)> = Vec::new();
    for pattern in LOG_PATTERNS {
        let mut from = 0;
        while let Some(pos) = lowered[from..].find(pattern) {
            let start = from + pos;
            let before_ok = start == 0
                || !lowered[..start]
                    .chars()
                    .next_back()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_');
            if before_ok {
                if let Some(name) = token_after(log, start + pattern.len()) {
                    hits.push((start, name));
                }
            }
            from = start + pattern.len();
        }
    }
    hits.sort_by_key(|(pos, _)| *pos);

    let mut records: Vec<DynamicDependencyRecord> = Vec::new();
    for (_, name) in hits {
        if !records.iter().any(|r| r.required_resource == name) {
            records.push(DynamicDependencyRecord {
                package: subject.clone(),
                required_resource: name.to_string(),
            });
        }
    }
    records
}

/// Runs the probe command for `package` and returns stdout followed by
/// stderr. The template is split into words shell-style and every
/// `{package}` is replaced by the package name; no shell is involved. A
/// nonzero exit status is not an error.
pub fn run_probe(template: &str, package: &PackageKey) -> Result<String, ProbeError> {
    let words = shell_words::split(template).map_err(|e| ProbeError::Template {
        template: template.to_string(),
        reason: e.to_string(),
    })?;
    let words: Vec<String> = words
        .into_iter()
        .map(|w| w.replace(PACKAGE_PLACEHOLDER, package.name()))
        .collect();
    let (program, args) = words.split_first().ok_or_else(|| ProbeError::Template {
        template: template.to_string(),
        reason: "empty command".to_string(),
    })?;
    let output = Command::new(program)
        .args(args)
        .output()
        .map_err(|source| ProbeError::Spawn {
            command: shell_words::join(&words),
            source,
        })?;
    let mut text = String::from_utf8_lossy(&output.stdout).into_owned();
    text.push_str(&String::from_utf8_lossy(&output.stderr));
    Ok(text)
}
