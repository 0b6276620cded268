//! Knowledge sources: wheel metadata, probe logs, Dockerfiles and
//! requirements files.
//!
//! The parsers are pure functions. [`Ingest`] writes wheel and dependency
//! records into a [`KnowledgeGraph`]; transactions extracted from project
//! configuration are written to a transactions file for mining instead.

mod dockerfile;
mod probe;
mod requirements;
mod wheel;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::graph::{GraphError, GraphStats, KnowledgeGraph};
use crate::package::{split_item, PackageKey, PackageKeyError, System};

pub use dockerfile::{
    extract_dockerfile_packages, install_candidates, run_commands, split_commands,
};
pub use probe::{
    parse_dependency_log, run_probe, DynamicDependencyRecord, ProbeError, ProbeOutput,
    LOG_PATTERNS, PACKAGE_PLACEHOLDER,
};
pub use requirements::{
    extract_requirements_packages, is_requirements_file_name, requirement_name,
};
pub use wheel::{parse_wheel_toplevel, WheelError, WheelMetadataRecord};

/// One project's set of prefixed package tokens (`apt_<name>` / `pip_<name>`).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transaction {
    items: BTreeSet<String>,
}

impl Transaction {
    pub fn new<I, S>(items: I) -> Result<Self, PackageKeyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = BTreeSet::new();
        for item in items {
            let item = item.into();
            split_item(&item)?;
            if item.chars().any(char::is_whitespace) {
                return Err(PackageKeyError::Whitespace(item));
            }
            set.insert(item);
        }
        Ok(Self { items: set })
    }

    /// Parses one space-separated transactions-file line.
    pub fn parse_line(line: &str) -> Result<Self, PackageKeyError> {
        Self::new(line.split_whitespace())
    }

    pub fn items(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(String::as_str)
    }

    pub fn contains(&self, item: &str) -> bool {
        self.items.contains(item)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn extend(&mut self, other: Transaction) {
        self.items.extend(other.items);
    }
}

impl fmt::Display for Transaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for item in &self.items {
            if !first {
                f.write_str(" ")?;
            }
            f.write_str(item)?;
            first = false;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum TransactionFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Item {
        path: String,
        line: usize,
        source: PackageKeyError,
    },
}

/// Reads a transactions file, skipping blank lines.
pub fn read_transactions(path: &Path) -> Result<Vec<Transaction>, TransactionFileError> {
    let text = fs::read_to_string(path).map_err(|source| TransactionFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_transactions(&text).map_err(|(line, source)| TransactionFileError::Item {
        path: path.display().to_string(),
        line,
        source,
    })
}

/// Parses transactions-file text; errors carry the 1-based line number.
pub fn parse_transactions(text: &str) -> Result<Vec<Transaction>, (usize, PackageKeyError)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| Transaction::parse_line(l).map_err(|e| (i + 1, e)))
        .collect()
}

/// Appends non-empty transactions, one per line.
pub fn append_transactions(path: &Path, transactions: &[Transaction]) -> io::Result<usize> {
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let mut written = 0;
    for t in transactions.iter().filter(|t| !t.is_empty()) {
        writeln!(file, "{t}")?;
        written += 1;
    }
    Ok(written)
}

/// Records that can be written into the knowledge graph.
pub trait Ingest {
    fn ingest_into(&self, graph: &mut KnowledgeGraph) -> Result<(), GraphError>;
}

fn pip_key(name: &str) -> Result<PackageKey, GraphError> {
    PackageKey::new(System::Pip, name).map_err(|e| GraphError::Validation {
        what: "package name",
        reason: e.to_string(),
    })
}

impl Ingest for WheelMetadataRecord {
    /// Package, version and one resource node per top-level name.
    fn ingest_into(&self, graph: &mut KnowledgeGraph) -> Result<(), GraphError> {
        let key = pip_key(&self.name)?;
        graph.upsert_package(key.clone(), &self.name)?;
        graph.upsert_version(&key, &self.version)?;
        for resource in &self.top_level {
            graph.add_resource(&key, &self.version, resource)?;
        }
        Ok(())
    }
}

impl Ingest for DynamicDependencyRecord {
    /// A dependency edge from the subject's latest known version.
    fn ingest_into(&self, graph: &mut KnowledgeGraph) -> Result<(), GraphError> {
        let version = graph
            .latest_version(&self.package)
            .ok_or_else(|| {
                if graph.contains_package(&self.package) {
                    GraphError::NoVersions(self.package.clone())
                } else {
                    GraphError::UnknownPackage(self.package.clone())
                }
            })?
            .to_string();
        graph.add_dependency(&self.package, &version, &self.required_resource)
    }
}

impl Ingest for ProbeOutput {
    /// Registers the probed package and version, then every dependency its
    /// log mentions.
    fn ingest_into(&self, graph: &mut KnowledgeGraph) -> Result<(), GraphError> {
        let key = pip_key(&self.package)?;
        graph.upsert_package(key.clone(), &self.package)?;
        graph.upsert_version(&key, &self.version)?;
        for record in parse_dependency_log(&self.log, &key) {
            graph.add_dependency(&key, &self.version, &record.required_resource)?;
        }
        Ok(())
    }
}

/// Ingests every record and reports what was added.
pub fn ingest<'a, R, I>(graph: &mut KnowledgeGraph, records: I) -> Result<IngestCounts, GraphError>
where
    R: Ingest + 'a,
    I: IntoIterator<Item = &'a R>,
{
    let before = graph.stats();
    for record in records {
        record.ingest_into(graph)?;
    }
    Ok(IngestCounts::between(before, graph.stats()))
}

/// Growth of the graph (and transactions file) during one ingestion run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestCounts {
    pub packages: usize,
    pub versions: usize,
    pub resources: usize,
    pub dependencies: usize,
    pub transactions: usize,
}

impl IngestCounts {
    pub fn between(before: GraphStats, after: GraphStats) -> Self {
        Self {
            packages: after.packages.saturating_sub(before.packages),
            versions: after.versions.saturating_sub(before.versions),
            resources: after.resources.saturating_sub(before.resources),
            dependencies: after
                .resource_dependencies
                .saturating_sub(before.resource_dependencies),
            transactions: 0,
        }
    }
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("+{n} {}", if n == 1 { one } else { many })
}

impl fmt::Display for IngestCounts {
    /// `+1 package, +1 version, +2 resources`, with dependency and
    /// transaction counts appended when nonzero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![
            plural(self.packages, "package", "packages"),
            plural(self.versions, "version", "versions"),
            plural(self.resources, "resource", "resources"),
        ];
        if self.dependencies > 0 {
            parts.push(plural(self.dependencies, "dependency", "dependencies"));
        }
        if self.transactions > 0 {
            parts.push(plural(self.transactions, "transaction", "transactions"));
        }
        f.write_str(&parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn biopython() -> WheelMetadataRecord {
        WheelMetadataRecord {
            name: "biopython".into(),
            version: "1.70".into(),
            top_level: vec!["Bio".into(), "BioSQL".into()],
        }
    }

    fn pip(name: &str) -> PackageKey {
        PackageKey::new(System::Pip, name).unwrap()
    }

    #[test]
    fn ingest_wheel_makes_resources_queryable() {
        let mut g = KnowledgeGraph::new();
        let counts = ingest(&mut g, [&biopython()]).unwrap();
        assert_eq!(counts.to_string(), "+1 package, +1 version, +2 resources");
        assert_eq!(
            g.find_packages_by_resource_prefix("Bio"),
            vec![pip("biopython")]
        );
        assert_eq!(
            g.find_packages_by_resource_prefix("Bio.Seq"),
            vec![pip("biopython")]
        );
    }

    #[test]
    fn ingest_is_idempotent() {
        let mut g = KnowledgeGraph::new();
        ingest(&mut g, [&biopython()]).unwrap();
        let snapshot = g.clone();
        let counts = ingest(&mut g, [&biopython()]).unwrap();
        assert_eq!(g, snapshot);
        assert_eq!(counts, IngestCounts::default());
        assert_eq!(counts.to_string(), "+0 packages, +0 versions, +0 resources");
    }

    #[test]
    fn pyhum_depends_on_numpy_once_numpy_is_known() {
        let mut g = KnowledgeGraph::new();
        let probe = ProbeOutput {
            package: "PyHum".into(),
            version: "1.4.6".into(),
            log: "ImportError: No module named numpy. Please install numpy first, it is needed before installing PyHum.".into(),
        };
        ingest(&mut g, [&probe]).unwrap();
        assert!(g.dependency_neighbors(&pip("pyhum")).unwrap().is_empty());
        let numpy = WheelMetadataRecord {
            name: "numpy".into(),
            version: "1.14.0".into(),
            top_level: vec!["numpy".into()],
        };
        ingest(&mut g, [&numpy]).unwrap();
        assert_eq!(
            g.dependency_neighbors(&pip("pyhum")).unwrap(),
            vec![pip("numpy")]
        );
    }

    #[test]
    fn dependency_record_uses_latest_version() {
        let mut g = KnowledgeGraph::new();
        let rec = DynamicDependencyRecord {
            package: pip("a"),
            required_resource: "b".into(),
        };
        assert_eq!(
            rec.ingest_into(&mut g),
            Err(GraphError::UnknownPackage(pip("a")))
        );
        g.upsert_package(pip("a"), "a").unwrap();
        assert_eq!(
            rec.ingest_into(&mut g),
            Err(GraphError::NoVersions(pip("a")))
        );
        g.upsert_version(&pip("a"), "1.9").unwrap();
        g.upsert_version(&pip("a"), "1.10").unwrap();
        rec.ingest_into(&mut g).unwrap();
        let edge = g.dependencies().next().unwrap();
        assert_eq!(edge.from_version.version, "1.10");
    }

    #[test]
    fn transactions_validate_and_render() {
        let t = Transaction::new(["pip_pylibmc", "apt_libmemcached-dev", "pip_pylibmc"]).unwrap();
        assert_eq!(t.to_string(), "apt_libmemcached-dev pip_pylibmc");
        assert_eq!(Transaction::parse_line(&t.to_string()).unwrap(), t);
        assert!(Transaction::new(["npm_left-pad"]).is_err());
        let err = parse_transactions("pip_a pip_b\n\nbad\n").unwrap_err();
        assert_eq!(err.0, 3);
    }

    #[test]
    fn transactions_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("transactions.txt");
        let ts = vec![
            Transaction::new(["pip_a", "apt_b"]).unwrap(),
            Transaction::default(),
            Transaction::new(["pip_c"]).unwrap(),
        ];
        assert_eq!(append_transactions(&path, &ts).unwrap(), 2);
        let back = read_transactions(&path).unwrap();
        assert_eq!(back, vec![ts[0].clone(), ts[2].clone()]);
    }
}
