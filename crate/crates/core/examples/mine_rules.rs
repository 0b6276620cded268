//! Mine co-installation rules from transactions and install them into a graph.
//!
//!     cargo run --example mine_rules

use depinfer::acquisition::{parse_transactions, Transaction};
use depinfer::mining::{install_rules, mine_rules, MiningConfig};
use depinfer::{KnowledgeGraph, PackageKey, System};

const TRANSACTIONS: &str = "\
apt_libmemcached-dev pip_pylibmc
apt_libmemcached-dev pip_pylibmc pip_django
apt_libmemcached-dev pip_pylibmc
pip_django pip_psycopg2 apt_libpq-dev
pip_flask pip_raven pip_blinker
pip_flask pip_raven pip_blinker
pip_raven pip_blinker
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let transactions: Vec<Transaction> =
        parse_transactions(TRANSACTIONS).map_err(|(line, e)| format!("line {line}: {e}"))?;
    let config = MiningConfig::default();
    let rules = mine_rules(&transactions, &config)?;
    for r in &rules {
        println!(
            "{:>22} -> {:<22} support {:.3}  confidence {:.3}  lift {:.3}  count {}",
            r.antecedent, r.consequent, r.support, r.confidence, r.lift, r.count
        );
    }

    let mut graph = KnowledgeGraph::new();
    install_rules(&rules, &mut graph)?;
    let pylibmc = PackageKey::new(System::Pip, "pylibmc")?;
    for n in graph.dependency_neighbors(&pylibmc)? {
        println!("{pylibmc} needs {n}");
    }
    Ok(())
}
