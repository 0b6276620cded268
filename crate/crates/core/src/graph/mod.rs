//! The inter-dependency knowledge graph.
//!
//! Nodes are packages, their versions, the resources each version exports, and
//! mined association rules. Edges are implicit in ownership (package owns
//! versions, version owns resources) except for dependency edges, which point
//! from a version to a resource *name* that may or may not be known.
//!
//! All queries return results in `(system, name)` order.

mod snapshot;
mod version;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::package::{PackageKey, System};

pub use snapshot::{
    load_snapshot, parse_snapshot, save_snapshot, AssociationRecord, EdgeRecord, NodeRecord,
    SnapshotError, EDGES_FILE, NODES_FILE,
};
pub use version::compare_versions;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid {what}: {reason}")]
    Validation { what: &'static str, reason: String },
    #[error("unknown package {0}")]
    UnknownPackage(PackageKey),
    #[error("unknown version {1} of package {0}")]
    UnknownVersion(PackageKey, String),
    #[error("package {0} has no versions")]
    NoVersions(PackageKey),
}

fn invalid(what: &'static str, reason: impl Into<String>) -> GraphError {
    GraphError::Validation {
        what,
        reason: reason.into(),
    }
}

fn check_token(what: &'static str, value: &str) -> Result<(), GraphError> {
    if value.is_empty() {
        return Err(invalid(what, "empty"));
    }
    if value.chars().any(char::is_whitespace) {
        return Err(invalid(what, format!("{value:?} contains whitespace")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackageNode {
    pub key: PackageKey,
    pub display_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct VersionNode {
    pub package: PackageKey,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ResourceNode {
    pub owner: VersionNode,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DependencyEdge {
    pub from_version: VersionNode,
    pub to_resource_name: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleMetrics {
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
    pub count: u64,
}

impl RuleMetrics {
    fn validate(&self) -> Result<(), GraphError> {
        let fraction = |v: f64| v > 0.0 && v <= 1.0;
        if !fraction(self.support) {
            return Err(invalid(
                "association",
                format!("support {} not in (0, 1]", self.support),
            ));
        }
        if !fraction(self.confidence) {
            return Err(invalid(
                "association",
                format!("confidence {} not in (0, 1]", self.confidence),
            ));
        }
        if !(self.lift >= 0.0 && self.lift.is_finite()) {
            return Err(invalid(
                "association",
                format!("lift {} is negative", self.lift),
            ));
        }
        if self.count == 0 {
            return Err(invalid("association", "count must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRuleNode {
    pub antecedent: PackageKey,
    pub consequent: PackageKey,
    pub metrics: RuleMetrics,
}

/// How a neighbor was reached from a package.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NeighborKind {
    ResourceDependency,
    Association,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct VersionEntry {
    resources: BTreeSet<String>,
    requires: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct PackageEntry {
    display_name: String,
    versions: BTreeMap<String, VersionEntry>,
}

/// Per-kind node and edge totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraphStats {
    pub packages: usize,
    pub versions: usize,
    pub resources: usize,
    pub associations: usize,
    pub resource_dependencies: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeGraph {
    packages: BTreeMap<PackageKey, PackageEntry>,
    rules: BTreeMap<(PackageKey, PackageKey), RuleMetrics>,
    // resource name -> packages owning it in any version
    resource_owners: BTreeMap<String, BTreeSet<PackageKey>>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.packages.is_empty() && self.rules.is_empty()
    }

    /// Inserts the package if absent. A repeat upsert keeps the original
    /// display name.
    pub fn upsert_package(
        &mut self,
        key: PackageKey,
        display_name: &str,
    ) -> Result<PackageNode, GraphError> {
        check_token("display name", display_name)?;
        let entry = self
            .packages
            .entry(key.clone())
            .or_insert_with(|| PackageEntry {
                display_name: display_name.to_string(),
                versions: BTreeMap::new(),
            });
        Ok(PackageNode {
            key,
            display_name: entry.display_name.clone(),
        })
    }

    pub fn upsert_version(&mut self, key: &PackageKey, version: &str) -> Result<(), GraphError> {
        check_token("version", version)?;
        let entry = self
            .packages
            .get_mut(key)
            .ok_or_else(|| GraphError::UnknownPackage(key.clone()))?;
        entry.versions.entry(version.to_string()).or_default();
        Ok(())
    }

    fn version_mut(
        &mut self,
        key: &PackageKey,
        version: &str,
    ) -> Result<&mut VersionEntry, GraphError> {
        self.packages
            .get_mut(key)
            .ok_or_else(|| GraphError::UnknownPackage(key.clone()))?
            .versions
            .get_mut(version)
            .ok_or_else(|| GraphError::UnknownVersion(key.clone(), version.to_string()))
    }

    pub fn add_resource(
        &mut self,
        key: &PackageKey,
        version: &str,
        resource: &str,
    ) -> Result<(), GraphError> {
        check_resource_name(resource)?;
        self.version_mut(key, version)?
            .resources
            .insert(resource.to_string());
        self.resource_owners
            .entry(resource.to_string())
            .or_default()
            .insert(key.clone());
        Ok(())
    }

    pub fn add_dependency(
        &mut self,
        key: &PackageKey,
        version: &str,
        required_resource: &str,
    ) -> Result<(), GraphError> {
        check_resource_name(required_resource)?;
        self.version_mut(key, version)?
            .requires
            .insert(required_resource.to_string());
        Ok(())
    }

    /// Inserts or replaces the rule for `(antecedent, consequent)`. Both
    /// packages must already exist.
    pub fn upsert_rule(&mut self, rule: AssociationRuleNode) -> Result<(), GraphError> {
        if rule.antecedent == rule.consequent {
            return Err(invalid(
                "association",
                format!("antecedent and consequent are both {}", rule.antecedent),
            ));
        }
        rule.metrics.validate()?;
        for key in [&rule.antecedent, &rule.consequent] {
            if !self.packages.contains_key(key) {
                return Err(GraphError::UnknownPackage(key.clone()));
            }
        }
        self.rules
            .insert((rule.antecedent, rule.consequent), rule.metrics);
        Ok(())
    }

    pub fn contains_package(&self, key: &PackageKey) -> bool {
        self.packages.contains_key(key)
    }

    pub fn package(&self, key: &PackageKey) -> Option<PackageNode> {
        self.packages.get(key).map(|e| PackageNode {
            key: key.clone(),
            display_name: e.display_name.clone(),
        })
    }

    pub fn display_name(&self, key: &PackageKey) -> Option<&str> {
        self.packages.get(key).map(|e| e.display_name.as_str())
    }

    pub fn rule(&self, antecedent: &PackageKey, consequent: &PackageKey) -> Option<RuleMetrics> {
        self.rules
            .get(&(antecedent.clone(), consequent.clone()))
            .copied()
    }

    /// Greatest version by [`compare_versions`].
    pub fn latest_version(&self, key: &PackageKey) -> Option<&str> {
        self.packages
            .get(key)?
            .versions
            .keys()
            .max_by(|a, b| compare_versions(a, b))
            .map(String::as_str)
    }

    /// Packages owning a resource named exactly `resource`.
    pub fn find_packages_by_resource(&self, resource: &str) -> Vec<PackageKey> {
        self.resource_owners
            .get(resource)
            .map(|owners| owners.iter().cloned().collect())
            .unwrap_or_default()
    }

    /// Packages owning a resource that equals `resource` or is a dotted-segment
    /// prefix of it: `zope` matches `zope.interface`, never `zopeX`.
    pub fn find_packages_by_resource_prefix(&self, resource: &str) -> Vec<PackageKey> {
        let mut found = BTreeSet::new();
        let mut candidate = resource;
        loop {
            if let Some(owners) = self.resource_owners.get(candidate) {
                found.extend(owners.iter().cloned());
            }
            match candidate.rfind('.') {
                Some(idx) => candidate = &candidate[..idx],
                None => break,
            }
        }
        found.into_iter().collect()
    }

    pub fn find_package_by_name(&self, system: System, name: &str) -> Option<PackageKey> {
        let key = PackageKey::new(system, name).ok()?;
        self.packages.contains_key(&key).then_some(key)
    }

    /// Neighbors with the edge kind that reaches them, filtered to rules with
    /// confidence `>= min_confidence`. A neighbor reachable both ways is
    /// reported as a resource dependency. The package itself is excluded.
    pub fn neighbors_with_kind(
        &self,
        key: &PackageKey,
        min_confidence: f64,
    ) -> Vec<(PackageKey, NeighborKind)> {
        let mut out: BTreeMap<PackageKey, NeighborKind> = BTreeMap::new();
        if let Some(entry) = self.packages.get(key) {
            if let Some(latest) = self.latest_version(key) {
                for required in &entry.versions[latest].requires {
                    for owner in self.find_packages_by_resource(required) {
                        out.insert(owner, NeighborKind::ResourceDependency);
                    }
                }
            }
        }
        let start = (key.clone(), min_key());
        for ((ant, cons), metrics) in self.rules.range(start..) {
            if ant != key {
                break;
            }
            if metrics.confidence >= min_confidence {
                out.entry(cons.clone()).or_insert(NeighborKind::Association);
            }
        }
        out.remove(key);
        out.into_iter().collect()
    }

    /// Packages this package depends on: owners of the resources its latest
    /// version requires, plus consequents of rules it is the antecedent of.
    pub fn dependency_neighbors(&self, key: &PackageKey) -> Result<Vec<PackageKey>, GraphError> {
        if !self.packages.contains_key(key) {
            return Err(GraphError::UnknownPackage(key.clone()));
        }
        Ok(self
            .neighbors_with_kind(key, 0.0)
            .into_iter()
            .map(|(k, _)| k)
            .collect())
    }

    pub fn packages(&self) -> impl Iterator<Item = PackageNode> + '_ {
        self.packages.iter().map(|(key, e)| PackageNode {
            key: key.clone(),
            display_name: e.display_name.clone(),
        })
    }

    pub fn versions(&self) -> impl Iterator<Item = VersionNode> + '_ {
        self.packages.iter().flat_map(|(key, e)| {
            e.versions.keys().map(move |v| VersionNode {
                package: key.clone(),
                version: v.clone(),
            })
        })
    }

    pub fn resources(&self) -> impl Iterator<Item = ResourceNode> + '_ {
        self.packages.iter().flat_map(|(key, e)| {
            e.versions.iter().flat_map(move |(v, ve)| {
                ve.resources.iter().map(move |r| ResourceNode {
                    owner: VersionNode {
                        package: key.clone(),
                        version: v.clone(),
                    },
                    name: r.clone(),
                })
            })
        })
    }

    pub fn dependencies(&self) -> impl Iterator<Item = DependencyEdge> + '_ {
        self.packages.iter().flat_map(|(key, e)| {
            e.versions.iter().flat_map(move |(v, ve)| {
                ve.requires.iter().map(move |r| DependencyEdge {
                    from_version: VersionNode {
                        package: key.clone(),
                        version: v.clone(),
                    },
                    to_resource_name: r.clone(),
                })
            })
        })
    }

    pub fn rules(&self) -> impl Iterator<Item = AssociationRuleNode> + '_ {
        self.rules.iter().map(|((a, c), m)| AssociationRuleNode {
            antecedent: a.clone(),
            consequent: c.clone(),
            metrics: *m,
        })
    }

    pub fn stats(&self) -> GraphStats {
        let mut stats = GraphStats {
            packages: self.packages.len(),
            associations: self.rules.len(),
            ..GraphStats::default()
        };
        for entry in self.packages.values() {
            stats.versions += entry.versions.len();
            for v in entry.versions.values() {
                stats.resources += v.resources.len();
                stats.resource_dependencies += v.requires.len();
            }
        }
        stats
    }
}

// Smallest possible key, used as a range lower bound.
fn min_key() -> PackageKey {
    PackageKey::normalized(System::Apt, "\u{0}").expect("NUL is a valid key byte")
}

fn check_resource_name(name: &str) -> Result<(), GraphError> {
    check_token("resource name", name)?;
    if name.starts_with('.') || name.ends_with('.') {
        return Err(invalid(
            "resource name",
            format!("{name:?} has a leading or trailing dot"),
        ));
    }
    Ok(())
}
