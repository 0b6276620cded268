//! Package identities shared by every layer: the management system a package
//! comes from and its normalized name.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackageKeyError {
    #[error("package name is empty")]
    EmptyName,
    #[error("package name {0:?} contains whitespace")]
    Whitespace(String),
    #[error("package name {name:?} is not normalized (expected {expected:?})")]
    NotNormalized { name: String, expected: String },
    #[error("unknown package system {0:?}")]
    UnknownSystem(String),
    #[error("item {0:?} has no apt_/pip_ prefix")]
    BadPrefix(String),
}

/// A package management system. `Apt` orders before `Pip`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Apt,
    Pip,
}

impl System {
    pub const ALL: [System; 2] = [System::Apt, System::Pip];

    pub fn as_str(self) -> &'static str {
        match self {
            System::Apt => "apt",
            System::Pip => "pip",
        }
    }

    /// Transaction item prefix, e.g. `pip_`.
    pub fn item_prefix(self) -> &'static str {
        match self {
            System::Apt => "apt_",
            System::Pip => "pip_",
        }
    }

    /// Canonical form of `name` under this system's comparison rules.
    ///
    /// pip follows PEP 503: lowercase, and every run of `-`, `_`, `.` becomes a
    /// single `-`. apt names are only lowercased.
    pub fn normalize(self, name: &str) -> String {
        match self {
            System::Apt => name.to_lowercase(),
            System::Pip => {
                let mut out = String::with_capacity(name.len());
                let mut in_sep = false;
                for c in name.chars() {
                    if matches!(c, '-' | '_' | '.') {
                        if !in_sep {
                            out.push('-');
                        }
                        in_sep = true;
                    } else {
                        out.extend(c.to_lowercase());
                        in_sep = false;
                    }
                }
                out
            }
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for System {
    type Err = PackageKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "apt" => Ok(System::Apt),
            "pip" => Ok(System::Pip),
            other => Err(PackageKeyError::UnknownSystem(other.to_string())),
        }
    }
}

/// `(system, normalized name)`; the identity of an installable package.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PackageKey {
    system: System,
    name: String,
}

impl PackageKey {
    /// Builds a key from a raw name, normalizing it first.
    pub fn new(system: System, raw_name: &str) -> Result<Self, PackageKeyError> {
        let name = system.normalize(raw_name.trim());
        Self::check_name(&name)?;
        Ok(Self { system, name })
    }

    /// Builds a key from a name that must already be in normalized form.
    pub fn normalized(system: System, name: &str) -> Result<Self, PackageKeyError> {
        Self::check_name(name)?;
        let expected = system.normalize(name);
        if expected != name {
            return Err(PackageKeyError::NotNormalized {
                name: name.to_string(),
                expected,
            });
        }
        Ok(Self {
            system,
            name: name.to_string(),
        })
    }

    fn check_name(name: &str) -> Result<(), PackageKeyError> {
        if name.is_empty() {
            return Err(PackageKeyError::EmptyName);
        }
        if name.chars().any(char::is_whitespace) {
            return Err(PackageKeyError::Whitespace(name.to_string()));
        }
        Ok(())
    }

    /// Parses a prefixed transaction item such as `apt_libpcap-dev`.
    pub fn from_item(item: &str) -> Result<Self, PackageKeyError> {
        let (system, rest) = split_item(item)?;
        Self::new(system, rest)
    }

    pub fn system(&self) -> System {
        self.system
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The prefixed transaction token for this key.
    pub fn item(&self) -> String {
        format!("{}{}", self.system.item_prefix(), self.name)
    }
}

impl fmt::Display for PackageKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.system, self.name)
    }
}

/// Splits `apt_x` / `pip_x` into its system and the remainder.
pub fn split_item(item: &str) -> Result<(System, &str), PackageKeyError> {
    for system in System::ALL {
        if let Some(rest) = item.strip_prefix(system.item_prefix()) {
            if rest.is_empty() {
                return Err(PackageKeyError::EmptyName);
            }
            return Ok((system, rest));
        }
    }
    Err(PackageKeyError::BadPrefix(item.to_string()))
}
