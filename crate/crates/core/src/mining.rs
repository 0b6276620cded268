//! Apriori mining of one-to-one co-installation rules over transactions.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::acquisition::Transaction;
use crate::graph::{
    AssociationRecord, AssociationRuleNode, GraphError, KnowledgeGraph, RuleMetrics,
};
use crate::package::{PackageKey, PackageKeyError};

pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.8;
pub const DEFAULT_MIN_SUPPORT_COUNT: u64 = 3;
/// One antecedent plus one consequent.
pub const RULE_LENGTH: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum MiningError {
    #[error("no transactions to mine")]
    NoTransactions,
    #[error("invalid mining configuration: {0}")]
    Config(String),
    #[error("rule item {item:?}: {source}")]
    Item {
        item: String,
        source: PackageKeyError,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningConfig {
    pub min_confidence: f64,
    pub max_rule_length: usize,
    pub min_support_count: u64,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self {
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            max_rule_length: RULE_LENGTH,
            min_support_count: DEFAULT_MIN_SUPPORT_COUNT,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<(), MiningError> {
        if !(self.min_confidence > 0.0 && self.min_confidence <= 1.0) {
            return Err(MiningError::Config(format!(
                "min_confidence {} not in (0, 1]",
                self.min_confidence
            )));
        }
        if self.min_support_count < 1 {
            return Err(MiningError::Config(
                "min_support_count must be at least 1".into(),
            ));
        }
        if self.max_rule_length != RULE_LENGTH {
            return Err(MiningError::Config(format!(
                "only rules of length {RULE_LENGTH} are supported, got {}",
                self.max_rule_length
            )));
        }
        Ok(())
    }
}

/// `antecedent -> consequent` over prefixed items.
#[derive(Debug, Clone, PartialEq)]
pub struct MinedRule {
    pub antecedent: String,
    pub consequent: String,
    /// `count / N`
    pub support: f64,
    /// `count / count(antecedent)`
    pub confidence: f64,
    /// `confidence / (count(consequent) / N)`
    pub lift: f64,
    /// Transactions containing both items.
    pub count: u64,
}

impl MinedRule {
    pub fn to_association(&self) -> Result<AssociationRuleNode, MiningError> {
        let key = |item: &str| {
            PackageKey::from_item(item).map_err(|source| MiningError::Item {
                item: item.to_string(),
                source,
            })
        };
        Ok(AssociationRuleNode {
            antecedent: key(&self.antecedent)?,
            consequent: key(&self.consequent)?,
            metrics: RuleMetrics {
                support: self.support,
                confidence: self.confidence,
                lift: self.lift,
                count: self.count,
            },
        })
    }

    /// The rules-file record, identical to the snapshot association record.
    pub fn to_record(&self) -> Result<AssociationRecord, MiningError> {
        Ok(AssociationRecord::from_rule(&self.to_association()?))
    }
}

/// Mines every rule `a -> c` with `count({a, c}) >= min_support_count` and
/// `confidence >= min_confidence`, sorted by `(antecedent, consequent)`.
/// Only items that are frequent on their own take part in pair counting.
pub fn mine_rules(
    transactions: &[Transaction],
    config: &MiningConfig,
) -> Result<Vec<MinedRule>, MiningError> {
    config.validate()?;
    if transactions.is_empty() {
        return Err(MiningError::NoTransactions);
    }
    let n = transactions.len() as f64;

    let mut item_counts: BTreeMap<&str, u64> = BTreeMap::new();
    for t in transactions {
        for item in t.items() {
            *item_counts.entry(item).or_default() += 1;
        }
    }
    let frequent: BTreeSet<&str> = item_counts
        .iter()
        .filter(|(_, &c)| c >= config.min_support_count)
        .map(|(&i, _)| i)
        .collect();

    let mut pair_counts: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for t in transactions {
        let present: Vec<&str> = t.items().filter(|i| frequent.contains(i)).collect();
        for (idx, &a) in present.iter().enumerate() {
            for &b in &present[idx + 1..] {
                *pair_counts.entry((a, b)).or_default() += 1;
            }
        }
    }

    let mut rules = Vec::new();
    for (&(a, b), &count) in &pair_counts {
        if count < config.min_support_count {
            continue;
        }
        for (ant, cons) in [(a, b), (b, a)] {
            let confidence = count as f64 / item_counts[ant] as f64;
            if confidence < config.min_confidence {
                continue;
            }
            rules.push(MinedRule {
                antecedent: ant.to_string(),
                consequent: cons.to_string(),
                support: count as f64 / n,
                confidence,
                lift: confidence / (item_counts[cons] as f64 / n),
                count,
            });
        }
    }
    rules.sort_by(|x, y| {
        (x.antecedent.as_str(), x.consequent.as_str())
            .cmp(&(y.antecedent.as_str(), y.consequent.as_str()))
    });
    Ok(rules)
}

/// Writes rules into the graph, creating missing packages. Existing rules for
/// the same pair get the new metrics. Returns how many rules were installed.
pub fn install_rules(
    rules: &[MinedRule],
    graph: &mut KnowledgeGraph,
) -> Result<usize, MiningError> {
    let nodes = rules
        .iter()
        .map(MinedRule::to_association)
        .collect::<Result<Vec<_>, _>>()?;
    for node in nodes.iter() {
        for key in [&node.antecedent, &node.consequent] {
            if !graph.contains_package(key) {
                graph.upsert_package(key.clone(), key.name())?;
            }
        }
        graph.upsert_rule(node.clone())?;
    }
    Ok(nodes.len())
}
