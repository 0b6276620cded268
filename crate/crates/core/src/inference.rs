//! From a snippet's imports to an ordered install plan.
//!
//! Resources are mapped onto candidate packages (graph resources, graph
//! package names, then the registry), and the candidates' transitive
//! dependencies are recovered by a post-order depth-first search, so every
//! package lands after the packages it needs.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::graph::{KnowledgeGraph, NeighborKind};
use crate::package::{PackageKey, System};
use crate::registry::Registry;
use crate::snippet::{extract_imports, filter_stdlib, ImportedResource, StdlibManifest};

/// Why a package is in the plan. Earlier variants take priority when several
/// apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    DirectExactResource,
    DirectPartialResource,
    DirectPackageName,
    DirectRegistry,
    TransitiveDependency,
    TransitiveAssociation,
}

impl Provenance {
    pub fn is_direct(self) -> bool {
        !matches!(
            self,
            Self::TransitiveDependency | Self::TransitiveAssociation
        )
    }
}

impl From<NeighborKind> for Provenance {
    fn from(kind: NeighborKind) -> Self {
        match kind {
            NeighborKind::ResourceDependency => Self::TransitiveDependency,
            NeighborKind::Association => Self::TransitiveAssociation,
        }
    }
}

/// A package the snippet needs directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub key: PackageKey,
    pub provenance: Provenance,
}

/// Candidates in discovery order plus anything worth telling the user.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mapping {
    pub candidates: Vec<Candidate>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanEntry {
    pub key: PackageKey,
    /// The name as published, used in `pip install` lines.
    pub display_name: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstallPlan {
    pub entries: Vec<PlanEntry>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct PlanJson<'a> {
    entries: Vec<EntryJson<'a>>,
    warnings: &'a [String],
}

#[derive(Serialize)]
struct EntryJson<'a> {
    system: System,
    name: &'a str,
    provenance: Provenance,
}

impl InstallPlan {
    pub fn keys(&self) -> impl Iterator<Item = &PackageKey> {
        self.entries.iter().map(|e| &e.key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, key: &PackageKey) -> Option<usize> {
        self.entries.iter().position(|e| &e.key == key)
    }

    /// `{"entries":[{"system":..,"name":..,"provenance":..}],"warnings":[..]}`,
    /// pretty-printed with a trailing newline.
    pub fn to_json(&self) -> String {
        let doc = PlanJson {
            entries: self
                .entries
                .iter()
                .map(|e| EntryJson {
                    system: e.key.system(),
                    name: e.key.name(),
                    provenance: e.provenance,
                })
                .collect(),
            warnings: &self.warnings,
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("plan serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone)]
pub struct InferenceConfig {
    pub stdlib: StdlibManifest,
    /// Association edges below this confidence are not followed.
    pub min_association_confidence: f64,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self {
            stdlib: StdlibManifest::bundled(crate::snippet::DEFAULT_PYTHON_VERSION)
                .expect("bundled manifest"),
            min_association_confidence: 0.0,
        }
    }
}

#[derive(Default)]
struct CandidateSet {
    order: Vec<PackageKey>,
    best: HashMap<PackageKey, Provenance>,
}

impl CandidateSet {
    fn add(&mut self, key: PackageKey, provenance: Provenance) {
        match self.best.get_mut(&key) {
            Some(p) => *p = (*p).min(provenance),
            None => {
                self.best.insert(key.clone(), provenance);
                self.order.push(key);
            }
        }
    }

    fn any_named(&self, name: &str) -> bool {
        self.order.iter().any(|k| k.name() == name)
    }
}

/// True if the registry says the package exists without an installable
/// version. Lookup failures become warnings and count as installable.
fn uninstallable(registry: &Registry, key: &PackageKey, warnings: &mut Vec<String>) -> bool {
    match registry.query(key.system(), key.name()) {
        Ok(answer) => answer.is_uninstallable(),
        Err(e) => {
            warnings.push(e.to_string());
            false
        }
    }
}

/// Maps resources onto packages. For each resource, in order:
///
/// 1. graph packages owning it exactly or by a dotted prefix;
/// 2. graph pip packages named like the resource or its first segment;
/// 3. unless a candidate is already named like the resource, registry pip
///    packages named like the resource or its first segment that have an
///    installable version.
///
/// Candidates the registry knows to have no installable version are dropped.
pub fn map_resources_to_packages(
    resources: &[ImportedResource],
    graph: &KnowledgeGraph,
    registry: &Registry,
) -> Mapping {
    let mut set = CandidateSet::default();
    let mut warnings = Vec::new();
    let mut refused: HashSet<PackageKey> = HashSet::new();

    for resource in resources {
        let name = resource.name.as_str();
        let first = resource.first_segment();
        let mut per_resource = CandidateSet::default();

        let exact: HashSet<PackageKey> =
            graph.find_packages_by_resource(name).into_iter().collect();
        for key in graph.find_packages_by_resource_prefix(name) {
            let provenance = if exact.contains(&key) {
                Provenance::DirectExactResource
            } else {
                Provenance::DirectPartialResource
            };
            per_resource.add(key, provenance);
        }
        // 2. package names
        for n in [name, first] {
            if let Some(key) = graph.find_package_by_name(System::Pip, n) {
                per_resource.add(key, Provenance::DirectPackageName);
            }
        }
        // 3. registry fallback
        if !per_resource.any_named(&System::Pip.normalize(name)) {
            for n in [name, first] {
                match registry.query(System::Pip, n) {
                    Ok(answer) if answer.exists && answer.has_installable_version => {
                        if let Ok(key) = PackageKey::normalized(System::Pip, &answer.canonical_name)
                        {
                            per_resource.add(key, Provenance::DirectRegistry);
                        }
                    }
                    Ok(_) => {}
                    Err(e) => warnings.push(e.to_string()),
                }
            }
        }

        for key in per_resource.order {
            let provenance = per_resource.best[&key];
            if refused.contains(&key) {
                continue;
            }
            if provenance != Provenance::DirectRegistry
                && !set.best.contains_key(&key)
                && uninstallable(registry, &key, &mut warnings)
            {
                refused.insert(key);
                continue;
            }
            set.add(key, provenance);
        }
    }

    Mapping {
        candidates: set
            .order
            .iter()
            .map(|k| Candidate {
                key: k.clone(),
                provenance: set.best[k],
            })
            .collect(),
        warnings,
    }
}

/// Post-order DFS from each root in the given order. A package is appended
/// once all its unvisited neighbors have been; the visited set makes cycles
/// and self-loops harmless. Roots keep their own provenance; other packages
/// are tagged by the edge that first reached them.
pub fn recover_transitive(
    roots: &[Candidate],
    graph: &KnowledgeGraph,
    min_association_confidence: f64,
) -> Vec<Candidate> {
    let root_provenance: HashMap<&PackageKey, Provenance> =
        roots.iter().rev().map(|c| (&c.key, c.provenance)).collect();
    let mut reached_by: HashMap<PackageKey, Provenance> = HashMap::new();
    let mut visited: HashSet<PackageKey> = HashSet::new();
    let mut plan = Vec::new();

    for root in roots {
        if !visited.insert(root.key.clone()) {
            continue;
        }
        let mut stack = vec![(
            root.key.clone(),
            graph.neighbors_with_kind(&root.key, min_association_confidence),
            0usize,
        )];
        while let Some((node, neighbors, next)) = stack.last_mut() {
            if let Some((child, kind)) = neighbors.get(*next).cloned() {
                *next += 1;
                if visited.insert(child.clone()) {
                    reached_by.insert(child.clone(), kind.into());
                    let grandchildren =
                        graph.neighbors_with_kind(&child, min_association_confidence);
                    stack.push((child, grandchildren, 0));
                }
            } else {
                let key = node.clone();
                stack.pop();
                let provenance = root_provenance
                    .get(&key)
                    .copied()
                    .unwrap_or_else(|| reached_by[&key]);
                plan.push(Candidate { key, provenance });
            }
        }
    }
    plan
}

/// Install order for bare package keys; see [`recover_transitive`].
pub fn install_order(roots: &[PackageKey], graph: &KnowledgeGraph) -> Vec<PackageKey> {
    let roots: Vec<Candidate> = roots
        .iter()
        .map(|k| Candidate {
            key: k.clone(),
            provenance: Provenance::DirectExactResource,
        })
        .collect();
    recover_transitive(&roots, graph, 0.0)
        .into_iter()
        .map(|c| c.key)
        .collect()
}

/// Imports, standard-library filter, mapping, transitive recovery, then a
/// final pass dropping anything the registry knows cannot be installed.
pub fn infer(
    source: &str,
    graph: &KnowledgeGraph,
    registry: &Registry,
    config: &InferenceConfig,
) -> InstallPlan {
    let resources = filter_stdlib(extract_imports(source), &config.stdlib);
    let Mapping {
        candidates,
        mut warnings,
    } = map_resources_to_packages(&resources, graph, registry);
    let ordered = recover_transitive(&candidates, graph, config.min_association_confidence);

    let mut entries = Vec::with_capacity(ordered.len());
    for c in ordered {
        if !c.provenance.is_direct() && uninstallable(registry, &c.key, &mut warnings) {
            warnings.push(format!("{} has no installable version; left out", c.key));
            continue;
        }
        entries.push(PlanEntry {
            display_name: graph
                .display_name(&c.key)
                .unwrap_or(c.key.name())
                .to_string(),
            key: c.key,
            provenance: c.provenance,
        });
    }
    warnings.dedup();
    InstallPlan { entries, warnings }
}
