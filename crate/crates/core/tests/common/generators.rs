//! Seeded random inputs for property and acceptance checks.

use std::collections::BTreeSet;

use depinfer::acquisition::Transaction;
use depinfer::graph::{AssociationRuleNode, KnowledgeGraph, RuleMetrics};
use depinfer::{PackageKey, System};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn metrics<R: Rng>(rng: &mut R) -> RuleMetrics {
    RuleMetrics {
        support: rng.gen_range(0.001..=1.0),
        confidence: rng.gen_range(0.8..=1.0),
        lift: rng.gen_range(0.0..200.0),
        count: rng.gen_range(3..500),
    }
}

/// A graph of `n` packages with a known dependency relation (by index).
pub struct RandomKb {
    pub graph: KnowledgeGraph,
    pub keys: Vec<PackageKey>,
    /// `(a, b)`: package `a` depends on package `b`.
    pub edges: Vec<(usize, usize)>,
}

impl RandomKb {
    pub fn key_edges(&self) -> Vec<(PackageKey, PackageKey)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.keys[a].clone(), self.keys[b].clone()))
            .collect()
    }

    pub fn random_roots<R: Rng>(&self, rng: &mut R) -> Vec<PackageKey> {
        let k = rng.gen_range(0..=self.keys.len().min(5));
        self.keys.choose_multiple(rng, k).cloned().collect()
    }
}

/// Packages `p<i>` (pip, owning resource `r<i>`) and `a<i>` (apt). An edge
/// is either a resource requirement (pip targets only) or an association
/// rule. With `acyclic`, edges only point to lower indices. Some packages
/// also carry requirements nobody provides and a self-requirement, neither
/// of which is an edge.
pub fn random_kb<R: Rng>(rng: &mut R, n: usize, edge_probability: f64, acyclic: bool) -> RandomKb {
    let mut graph = KnowledgeGraph::new();
    let mut keys = Vec::with_capacity(n);
    for i in 0..n {
        let key = if rng.gen_bool(0.8) {
            PackageKey::new(System::Pip, &format!("p{i}")).unwrap()
        } else {
            PackageKey::new(System::Apt, &format!("a{i}")).unwrap()
        };
        graph.upsert_package(key.clone(), key.name()).unwrap();
        graph.upsert_version(&key, "1.0").unwrap();
        if key.system() == System::Pip {
            graph.add_resource(&key, "1.0", &format!("r{i}")).unwrap();
            if rng.gen_bool(0.1) {
                graph.add_dependency(&key, "1.0", &format!("r{i}")).unwrap();
            }
        }
        if rng.gen_bool(0.1) {
            graph
                .add_dependency(&key, "1.0", &format!("missing{i}"))
                .unwrap();
        }
        keys.push(key);
    }
    let mut edges = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            if a == b || (acyclic && b >= a) || !rng.gen_bool(edge_probability) {
                continue;
            }
            if keys[b].system() == System::Pip && rng.gen_bool(0.5) {
                graph
                    .add_dependency(&keys[a], "1.0", &format!("r{b}"))
                    .unwrap();
            } else {
                graph
                    .upsert_rule(AssociationRuleNode {
                        antecedent: keys[a].clone(),
                        consequent: keys[b].clone(),
                        metrics: metrics(rng),
                    })
                    .unwrap();
            }
            edges.insert((a, b));
        }
    }
    RandomKb {
        graph,
        keys,
        edges: edges.into_iter().collect(),
    }
}

/// Like [`random_kb`] without `acyclic`, plus at least one forced cycle.
pub fn random_cyclic_kb<R: Rng>(rng: &mut R, n: usize, edge_probability: f64) -> RandomKb {
    let mut kb = random_kb(rng, n.max(2), edge_probability, false);
    let len = rng.gen_range(2..=kb.keys.len().min(6));
    let cycle: Vec<usize> = (0..kb.keys.len())
        .collect::<Vec<_>>()
        .choose_multiple(rng, len)
        .copied()
        .collect();
    for w in 0..len {
        let (a, b) = (cycle[w], cycle[(w + 1) % len]);
        if kb.edges.contains(&(a, b)) {
            continue;
        }
        kb.graph
            .upsert_rule(AssociationRuleNode {
                antecedent: kb.keys[a].clone(),
                consequent: kb.keys[b].clone(),
                metrics: metrics(rng),
            })
            .unwrap();
        kb.edges.push((a, b));
    }
    kb.edges.sort();
    kb
}

/// A graph exercising every node kind: mixed-case display names, several
/// versions, resources shared between packages, dangling requirements and
/// rules with arbitrary metrics.
pub fn random_rich_graph<R: Rng>(rng: &mut R) -> KnowledgeGraph {
    let mut g = KnowledgeGraph::new();
    let n = rng.gen_range(0..30);
    let mut keys = Vec::new();
    for i in 0..n {
        let system = if rng.gen_bool(0.7) {
            System::Pip
        } else {
            System::Apt
        };
        let display = match rng.gen_range(0..4) {
            0 => format!("Pkg_{i}"),
            1 => format!("pkg.{i}.Ext"),
            2 => format!("lib{i}-dev"),
            _ => format!("p{i}"),
        };
        let key = PackageKey::new(system, &display).unwrap();
        g.upsert_package(key.clone(), &display).unwrap();
        for v in 0..rng.gen_range(0..4) {
            let version = format!("{}.{}", rng.gen_range(0..3), v);
            g.upsert_version(&key, &version).unwrap();
            for _ in 0..rng.gen_range(0..3) {
                let r = format!("mod{}", rng.gen_range(0..20));
                g.add_resource(&key, &version, &r).unwrap();
            }
            for _ in 0..rng.gen_range(0..3) {
                let r = format!("mod{}.sub", rng.gen_range(0..25));
                g.add_dependency(&key, &version, &r).unwrap();
            }
        }
        keys.push(key);
    }
    for _ in 0..rng.gen_range(0..=2 * n) {
        let (Some(a), Some(c)) = (keys.choose(rng), keys.choose(rng)) else {
            break;
        };
        if a != c {
            g.upsert_rule(AssociationRuleNode {
                antecedent: a.clone(),
                consequent: c.clone(),
                metrics: RuleMetrics {
                    support: rng.gen_range(1e-9..=1.0),
                    confidence: rng.gen_range(1e-9..=1.0),
                    lift: rng.gen_range(0.0..1e6),
                    count: rng.gen_range(1..u32::MAX as u64),
                },
            })
            .unwrap();
        }
    }
    g
}

/// Up to `max_transactions` transactions over at most `max_items` items.
pub fn random_transactions<R: Rng>(
    rng: &mut R,
    max_items: usize,
    max_transactions: usize,
) -> Vec<Transaction> {
    let universe: Vec<String> = (0..rng.gen_range(1..=max_items))
        .map(|i| {
            if i % 3 == 0 {
                format!("apt_lib{i}")
            } else {
                format!("pip_pkg{i}")
            }
        })
        .collect();
    let density = rng.gen_range(0.1..0.9);
    (0..rng.gen_range(1..=max_transactions))
        .map(|_| {
            Transaction::new(universe.iter().filter(|_| rng.gen_bool(density)).cloned()).unwrap()
        })
        .collect()
}
