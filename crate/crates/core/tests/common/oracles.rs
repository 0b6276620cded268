//! Brute-force reference implementations the real code is checked against.

use std::collections::{BTreeSet, HashMap, VecDeque};

use depinfer::acquisition::Transaction;
use depinfer::mining::MiningConfig;

/// Largest item universe [`oracle_mine`] will enumerate.
pub const ORACLE_MAX_ITEMS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRule {
    pub antecedent: String,
    pub consequent: String,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
    pub count: u64,
}

/// Every ordered pair of distinct items, counted by a full scan per pair.
pub fn oracle_mine(
    transactions: &[Transaction],
    config: &MiningConfig,
) -> Result<Vec<OracleRule>, String> {
    let items: BTreeSet<&str> = transactions.iter().flat_map(|t| t.items()).collect();
    if items.len() > ORACLE_MAX_ITEMS {
        return Err(format!(
            "oracle supports at most {ORACLE_MAX_ITEMS} items, got {}",
            items.len()
        ));
    }
    let n = transactions.len() as f64;
    let count = |pred: &dyn Fn(&Transaction) -> bool| {
        transactions.iter().filter(|t| pred(t)).count() as u64
    };
    let mut rules = Vec::new();
    for &a in &items {
        for &c in &items {
            if a == c {
                continue;
            }
            let both = count(&|t| t.contains(a) && t.contains(c));
            if both == 0 || both < config.min_support_count {
                continue;
            }
            let count_a = count(&|t| t.contains(a));
            let count_c = count(&|t| t.contains(c));
            let confidence = both as f64 / count_a as f64;
            if confidence < config.min_confidence {
                continue;
            }
            rules.push(OracleRule {
                antecedent: a.to_string(),
                consequent: c.to_string(),
                support: both as f64 / n,
                confidence,
                lift: confidence / (count_c as f64 / n),
                count: both,
            });
        }
    }
    Ok(rules)
}

/// True iff for every edge `a -> b` (a depends on b) with `a` in the plan,
/// `b` is in the plan at a lower index.
pub fn oracle_topo_check<T: Eq + std::hash::Hash>(plan: &[T], edges: &[(T, T)]) -> bool {
    let index: HashMap<&T, usize> = plan.iter().enumerate().map(|(i, k)| (k, i)).collect();
    edges
        .iter()
        .all(|(a, b)| match (index.get(a), index.get(b)) {
            (Some(ia), Some(ib)) => ib < ia || a == b,
            (Some(_), None) => false,
            (None, _) => true,
        })
}

/// Roots plus everything reachable from them, by breadth-first search over
/// an adjacency list built from `edges`.
pub fn oracle_reachable<T: Clone + Eq + std::hash::Hash + Ord>(
    roots: &[T],
    edges: &[(T, T)],
) -> BTreeSet<T> {
    let mut adjacency: HashMap<&T, Vec<&T>> = HashMap::new();
    for (a, b) in edges {
        adjacency.entry(a).or_default().push(b);
    }
    let mut seen: BTreeSet<T> = roots.iter().cloned().collect();
    let mut queue: VecDeque<&T> = roots.iter().collect();
    while let Some(node) = queue.pop_front() {
        for &next in adjacency.get(node).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}
