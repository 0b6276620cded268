//! Snippet analysis: which non-standard-library resources does it import?

mod imports;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

pub use imports::{extract_imports, ImportOrigin, ImportedResource};

/// Python version whose manifest is used when none is configured.
pub const DEFAULT_PYTHON_VERSION: &str = "2.7";

const BUNDLED: &[(&str, &str)] = &[
    ("2.7", include_str!("../../data/stdlib-2.7.json")),
    ("3.10", include_str!("../../data/stdlib-3.10.json")),
];

#[derive(Debug, Error)]
pub enum StdlibError {
    #[error("no bundled standard-library manifest for Python {0}")]
    UnknownVersion(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed manifest: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid manifest: {0}")]
    Invalid(String),
}

#[derive(Deserialize)]
struct ManifestFile {
    version: String,
    modules: Vec<String>,
}

/// Top-level module names of one Python version's standard library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StdlibManifest {
    python_version_tag: String,
    modules: BTreeSet<String>,
}

impl StdlibManifest {
    pub fn new(
        python_version_tag: impl Into<String>,
        modules: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, StdlibError> {
        let modules: BTreeSet<String> = modules.into_iter().map(Into::into).collect();
        for required in ["os", "sys", "re"] {
            if !modules.contains(required) {
                return Err(StdlibError::Invalid(format!(
                    "missing core module {required:?}"
                )));
            }
        }
        Ok(Self {
            python_version_tag: python_version_tag.into(),
            modules,
        })
    }

    /// `{"version":"2.7","modules":[...]}`
    pub fn from_json(text: &str) -> Result<Self, StdlibError> {
        let file: ManifestFile = serde_json::from_str(text)?;
        Self::new(file.version, file.modules)
    }

    pub fn bundled(version: &str) -> Result<Self, StdlibError> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(v, _)| *v == version)
            .ok_or_else(|| StdlibError::UnknownVersion(version.to_string()))?;
        Self::from_json(text)
    }

    /// Loads `<dir>/stdlib-<version>.json`.
    pub fn load(dir: &Path, version: &str) -> Result<Self, StdlibError> {
        let path = dir.join(format!("stdlib-{version}.json"));
        let text = fs::read_to_string(&path).map_err(|source| StdlibError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let manifest = Self::from_json(&text)?;
        if manifest.python_version_tag != version {
            return Err(StdlibError::Invalid(format!(
                "{} declares version {:?}",
                path.display(),
                manifest.python_version_tag
            )));
        }
        Ok(manifest)
    }

    pub fn bundled_versions() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(v, _)| *v)
    }

    pub fn version(&self) -> &str {
        &self.python_version_tag
    }

    pub fn contains(&self, module: &str) -> bool {
        self.modules.contains(module)
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }
}

/// Drops resources whose first dotted segment is a standard-library module.
pub fn filter_stdlib(
    resources: Vec<ImportedResource>,
    manifest: &StdlibManifest,
) -> Vec<ImportedResource> {
    resources
        .into_iter()
        .filter(|r| !manifest.contains(r.first_segment()))
        .collect()
}
