//! On-disk snapshot: a directory holding `nodes.jsonl` and `edges.jsonl`, one
//! JSON record per line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AssociationRuleNode, GraphError, KnowledgeGraph, RuleMetrics};
use crate::package::{PackageKey, PackageKeyError, System};

pub const NODES_FILE: &str = "nodes.jsonl";
pub const EDGES_FILE: &str = "edges.jsonl";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{file}:{line}: malformed record: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}:{line}: schema violation: {message}")]
    Schema {
        file: String,
        line: usize,
        message: String,
    },
}

impl SnapshotError {
    pub fn line(&self) -> Option<usize> {
        match self {
            SnapshotError::Io { .. } => None,
            SnapshotError::Parse { line, .. } | SnapshotError::Schema { line, .. } => Some(*line),
        }
    }
}

/// The association record, shared with the rules file written by mining.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationRecord {
    pub ant_system: System,
    pub ant: String,
    pub cons_system: System,
    pub cons: String,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
    pub count: u64,
}

impl AssociationRecord {
    pub fn from_rule(rule: &AssociationRuleNode) -> Self {
        Self {
            ant_system: rule.antecedent.system(),
            ant: rule.antecedent.name().to_string(),
            cons_system: rule.consequent.system(),
            cons: rule.consequent.name().to_string(),
            support: rule.metrics.support,
            confidence: rule.metrics.confidence,
            lift: rule.metrics.lift,
            count: rule.metrics.count,
        }
    }

    pub fn to_rule(&self) -> Result<AssociationRuleNode, PackageKeyError> {
        Ok(AssociationRuleNode {
            antecedent: PackageKey::normalized(self.ant_system, &self.ant)?,
            consequent: PackageKey::normalized(self.cons_system, &self.cons)?,
            metrics: RuleMetrics {
                support: self.support,
                confidence: self.confidence,
                lift: self.lift,
                count: self.count,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeRecord {
    Package {
        system: System,
        name: String,
        display_name: String,
    },
    Version {
        system: System,
        package: String,
        version: String,
    },
    Resource {
        system: System,
        package: String,
        version: String,
        resource: String,
    },
    Association(AssociationRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeRecord {
    ResourceDependency {
        system: System,
        package: String,
        version: String,
        requires_resource: String,
    },
}

fn node_records(graph: &KnowledgeGraph) -> Vec<NodeRecord> {
    let mut out = Vec::new();
    out.extend(graph.packages().map(|p| NodeRecord::Package {
        system: p.key.system(),
        name: p.key.name().to_string(),
        display_name: p.display_name,
    }));
    out.extend(graph.versions().map(|v| NodeRecord::Version {
        system: v.package.system(),
        package: v.package.name().to_string(),
        version: v.version,
    }));
    out.extend(graph.resources().map(|r| NodeRecord::Resource {
        system: r.owner.package.system(),
        package: r.owner.package.name().to_string(),
        version: r.owner.version,
        resource: r.name,
    }));
    out.extend(
        graph
            .rules()
            .map(|r| NodeRecord::Association(AssociationRecord::from_rule(&r))),
    );
    out
}

fn edge_records(graph: &KnowledgeGraph) -> Vec<EdgeRecord> {
    graph
        .dependencies()
        .map(|d| EdgeRecord::ResourceDependency {
            system: d.from_version.package.system(),
            package: d.from_version.package.name().to_string(),
            version: d.from_version.version,
            requires_resource: d.to_resource_name,
        })
        .collect()
}

fn to_jsonl<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), SnapshotError> {
    let io_err = |source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(io_err)?;
    file.write_all(contents.as_bytes()).map_err(io_err)?;
    file.sync_all().map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

/// Writes the graph into `dir`, creating it if needed. Each file is written to
/// a temporary sibling and renamed into place.
pub fn save_snapshot(graph: &KnowledgeGraph, dir: &Path) -> Result<(), SnapshotError> {
    fs::create_dir_all(dir).map_err(|source| SnapshotError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write_atomic(&dir.join(NODES_FILE), &to_jsonl(&node_records(graph)))?;
    write_atomic(&dir.join(EDGES_FILE), &to_jsonl(&edge_records(graph)))
}

pub fn load_snapshot(dir: &Path) -> Result<KnowledgeGraph, SnapshotError> {
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(|source| SnapshotError::Io { path, source })
    };
    let nodes = read(NODES_FILE)?;
    let edges = read(EDGES_FILE)?;
    parse_snapshot(&nodes, &edges)
}

fn parse_lines<T: for<'de> Deserialize<'de>>(
    file: &str,
    text: &str,
) -> Result<Vec<(usize, T)>, SnapshotError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line).map_err(|e| SnapshotError::Parse {
            file: file.to_string(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push((idx + 1, record));
    }
    Ok(out)
}

/// Builds a graph from snapshot file contents. Records may appear in any
/// order; packages are installed first, then versions, resources, rules and
/// dependency edges.
pub fn parse_snapshot(nodes: &str, edges: &str) -> Result<KnowledgeGraph, SnapshotError> {
    let node_records: Vec<(usize, NodeRecord)> = parse_lines(NODES_FILE, nodes)?;
    let edge_records: Vec<(usize, EdgeRecord)> = parse_lines(EDGES_FILE, edges)?;

    let schema = |file: &str, line: usize, message: String| SnapshotError::Schema {
        file: file.to_string(),
        line,
        message,
    };
    let key = |file: &str, line: usize, system: System, name: &str| {
        PackageKey::normalized(system, name).map_err(|e| schema(file, line, e.to_string()))
    };
    let graph_err = |file: &str, line: usize, e: GraphError| schema(file, line, e.to_string());

    let mut graph = KnowledgeGraph::new();
    let rank = |r: &NodeRecord| match r {
        NodeRecord::Package { .. } => 0,
        NodeRecord::Version { .. } => 1,
        NodeRecord::Resource { .. } => 2,
        NodeRecord::Association(_) => 3,
    };
    let mut ordered: Vec<&(usize, NodeRecord)> = node_records.iter().collect();
    ordered.sort_by_key(|(line, r)| (rank(r), *line));

    let mut seen_versions = std::collections::BTreeSet::new();
    let mut seen_resources = std::collections::BTreeSet::new();
    for (line, record) in ordered {
        let line = *line;
        match record {
            NodeRecord::Package {
                system,
                name,
                display_name,
            } => {
                let k = key(NODES_FILE, line, *system, name)?;
                if graph.contains_package(&k) {
                    return Err(schema(NODES_FILE, line, format!("duplicate package {k}")));
                }
                graph
                    .upsert_package(k, display_name)
                    .map_err(|e| graph_err(NODES_FILE, line, e))?;
            }
            NodeRecord::Version {
                system,
                package,
                version,
            } => {
                let k = key(NODES_FILE, line, *system, package)?;
                if !seen_versions.insert((k.clone(), version.clone())) {
                    return Err(schema(
                        NODES_FILE,
                        line,
                        format!("duplicate version {version} of {k}"),
                    ));
                }
                graph
                    .upsert_version(&k, version)
                    .map_err(|e| graph_err(NODES_FILE, line, e))?;
            }
            NodeRecord::Resource {
                system,
                package,
                version,
                resource,
            } => {
                let k = key(NODES_FILE, line, *system, package)?;
                if !seen_resources.insert((k.clone(), version.clone(), resource.clone())) {
                    return Err(schema(
                        NODES_FILE,
                        line,
                        format!("duplicate resource {resource} of {k} {version}"),
                    ));
                }
                graph
                    .add_resource(&k, version, resource)
                    .map_err(|e| graph_err(NODES_FILE, line, e))?;
            }
            NodeRecord::Association(record) => {
                let rule = record
                    .to_rule()
                    .map_err(|e| schema(NODES_FILE, line, e.to_string()))?;
                if graph.rule(&rule.antecedent, &rule.consequent).is_some() {
                    return Err(schema(
                        NODES_FILE,
                        line,
                        format!(
                            "duplicate association {} -> {}",
                            rule.antecedent, rule.consequent
                        ),
                    ));
                }
                graph
                    .upsert_rule(rule)
                    .map_err(|e| graph_err(NODES_FILE, line, e))?;
            }
        }
    }

    let mut seen_edges = std::collections::BTreeSet::new();
    for (line, record) in &edge_records {
        let line = *line;
        let EdgeRecord::ResourceDependency {
            system,
            package,
            version,
            requires_resource,
        } = record;
        let k = key(EDGES_FILE, line, *system, package)?;
        if !seen_edges.insert((k.clone(), version.clone(), requires_resource.clone())) {
            return Err(schema(
                EDGES_FILE,
                line,
                format!("duplicate resource_dependency {k} {version} -> {requires_resource}"),
            ));
        }
        graph
            .add_dependency(&k, version, requires_resource)
            .map_err(|e| graph_err(EDGES_FILE, line, e))?;
    }
    Ok(graph)
}
