//! "Does this package exist, and can it be installed?" for pip and apt.
//!
//! Lookups go through a [`Registry`], which normalizes names and memoizes
//! answers. Backends are offline fixtures by default; a PyPI JSON API backend
//! is available for live use.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use crate::package::System;

/// Environment variable overriding the live index URL.
pub const INDEX_URL_ENV: &str = "DEPINFER_INDEX_URL";
pub const DEFAULT_INDEX_URL: &str = "https://pypi.org";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryAnswer {
    pub exists: bool,
    pub has_installable_version: bool,
    pub canonical_name: String,
}

impl RegistryAnswer {
    pub fn missing(name: &str) -> Self {
        Self {
            exists: false,
            has_installable_version: false,
            canonical_name: name.to_string(),
        }
    }

    /// Exists but nothing can be installed.
    pub fn is_uninstallable(&self) -> bool {
        self.exists && !self.has_installable_version
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    /// Network trouble; says nothing about whether the package exists.
    #[error("{system} lookup of {name:?} failed: {reason}")]
    Transient {
        system: System,
        name: String,
        reason: String,
    },
    #[error("registry configuration: {0}")]
    Config(String),
}

/// Answers lookups for normalized names of one system.
pub trait RegistryBackend: Send + Sync {
    fn lookup(&self, name: &str) -> Result<RegistryAnswer, RegistryError>;
}

/// Knows nothing; every package is missing.
#[derive(Debug, Default)]
pub struct EmptyBackend;

impl RegistryBackend for EmptyBackend {
    fn lookup(&self, name: &str) -> Result<RegistryAnswer, RegistryError> {
        Ok(RegistryAnswer::missing(name))
    }
}

#[derive(Deserialize)]
struct FixtureEntry {
    releases: u64,
}

/// Offline pip index: `{"<name>": {"releases": <count>}, ...}`.
#[derive(Debug, Default, Clone)]
pub struct PipFixture {
    releases: HashMap<String, u64>,
}

impl PipFixture {
    pub fn from_json(text: &str) -> Result<Self, RegistryError> {
        let raw: HashMap<String, FixtureEntry> = serde_json::from_str(text)
            .map_err(|e| RegistryError::Config(format!("malformed pip fixture: {e}")))?;
        let mut releases = HashMap::new();
        for (name, entry) in raw {
            let normalized = System::Pip.normalize(&name);
            if releases
                .insert(normalized.clone(), entry.releases)
                .is_some()
            {
                return Err(RegistryError::Config(format!(
                    "pip fixture lists {normalized:?} twice"
                )));
            }
        }
        Ok(Self { releases })
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let text = fs::read_to_string(path)
            .map_err(|e| RegistryError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn insert(&mut self, name: &str, releases: u64) {
        self.releases.insert(System::Pip.normalize(name), releases);
    }
}

impl RegistryBackend for PipFixture {
    fn lookup(&self, name: &str) -> Result<RegistryAnswer, RegistryError> {
        Ok(match self.releases.get(name) {
            Some(&n) => RegistryAnswer {
                exists: true,
                has_installable_version: n > 0,
                canonical_name: name.to_string(),
            },
            None => RegistryAnswer::missing(name),
        })
    }
}

/// Known apt package names, one per line (an `apt-cache pkgnames` dump).
/// Every listed package counts as installable.
#[derive(Debug, Default, Clone)]
pub struct AptNameList {
    names: HashSet<String>,
}

impl AptNameList {
    pub fn parse(text: &str) -> Self {
        Self {
            names: text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| System::Apt.normalize(l))
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let text = fs::read_to_string(path)
            .map_err(|e| RegistryError::Config(format!("{}: {e}", path.display())))?;
        Ok(Self::parse(&text))
    }
}

impl RegistryBackend for AptNameList {
    fn lookup(&self, name: &str) -> Result<RegistryAnswer, RegistryError> {
        let exists = self.names.contains(name);
        Ok(RegistryAnswer {
            exists,
            has_installable_version: exists,
            canonical_name: name.to_string(),
        })
    }
}

#[derive(Deserialize)]
struct ProjectInfo {
    #[serde(default)]
    releases: HashMap<String, serde_json::Value>,
}

/// Live PyPI JSON API: `GET <index>/pypi/<name>/json`.
pub struct PypiJsonApi {
    index_url: String,
    agent: ureq::Agent,
}

impl PypiJsonApi {
    pub fn new(index_url: &str, timeout: Duration) -> Self {
        Self {
            index_url: index_url.trim_end_matches('/').to_string(),
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }

    /// Index URL from [`INDEX_URL_ENV`], falling back to PyPI.
    pub fn from_env() -> Self {
        let url = std::env::var(INDEX_URL_ENV).unwrap_or_else(|_| DEFAULT_INDEX_URL.to_string());
        Self::new(&url, DEFAULT_TIMEOUT)
    }

    fn fetch(&self, name: &str) -> Result<RegistryAnswer, String> {
        let url = format!("{}/pypi/{name}/json", self.index_url);
        match self.agent.get(&url).call() {
            Ok(response) => {
                let body = response
                    .into_string()
                    .map_err(|e| format!("reading {url}: {e}"))?;
                let info: ProjectInfo =
                    serde_json::from_str(&body).map_err(|e| format!("bad JSON from {url}: {e}"))?;
                // a release may be listed with no files at all
                let installable = info.releases.values().any(|files| match files {
                    serde_json::Value::Array(files) => !files.is_empty(),
                    _ => true,
                });
                Ok(RegistryAnswer {
                    exists: true,
                    has_installable_version: installable,
                    canonical_name: name.to_string(),
                })
            }
            Err(ureq::Error::Status(404, _)) => Ok(RegistryAnswer::missing(name)),
            Err(ureq::Error::Status(code, _)) => Err(format!("HTTP {code} from {url}")),
            Err(e) => Err(e.to_string()),
        }
    }
}

impl RegistryBackend for PypiJsonApi {
    fn lookup(&self, name: &str) -> Result<RegistryAnswer, RegistryError> {
        self.fetch(name)
            .or_else(|_| self.fetch(name))
            .map_err(|reason| RegistryError::Transient {
                system: System::Pip,
                name: name.to_string(),
                reason,
            })
    }
}

/// Memoizing front over one backend per system. Transient failures are not
/// cached.
pub struct Registry {
    pip: Box<dyn RegistryBackend>,
    apt: Box<dyn RegistryBackend>,
    cache: Mutex<HashMap<(System, String), RegistryAnswer>>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::new(Box::new(EmptyBackend), Box::new(EmptyBackend))
    }
}

impl Registry {
    pub fn new(pip: Box<dyn RegistryBackend>, apt: Box<dyn RegistryBackend>) -> Self {
        Self {
            pip,
            apt,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn offline(pip: PipFixture, apt: AptNameList) -> Self {
        Self::new(Box::new(pip), Box::new(apt))
    }

    pub fn query(&self, system: System, name: &str) -> Result<RegistryAnswer, RegistryError> {
        let normalized = system.normalize(name.trim());
        if normalized.is_empty() || normalized.chars().any(char::is_whitespace) {
            return Ok(RegistryAnswer::missing(&normalized));
        }
        let cache_key = (system, normalized);
        if let Some(hit) = self.cache.lock().unwrap().get(&cache_key) {
            return Ok(hit.clone());
        }
        let backend = match system {
            System::Pip => &self.pip,
            System::Apt => &self.apt,
        };
        let answer = backend.lookup(&cache_key.1)?;
        self.cache.lock().unwrap().insert(cache_key, answer.clone());
        Ok(answer)
    }

    /// Existence predicate for extraction gates. Lookup failures count as
    /// unknown.
    pub fn known(&self, system: System) -> impl Fn(&str) -> bool + '_ {
        move |name| match self.query(system, name) {
            Ok(answer) => answer.exists,
            Err(e) => {
                log::warn!("{e}");
                false
            }
        }
    }

    /// Number of memoized answers.
    pub fn cached(&self) -> usize {
        self.cache.lock().unwrap().len()
    }
}
