//! Build a small knowledge base from wheel metadata and a probe log, then save
//! it as a snapshot.
//!
//!     cargo run --example build_kb -- /tmp/kb

use std::path::PathBuf;

use depinfer::acquisition::{ingest, ProbeOutput, WheelMetadataRecord};
use depinfer::graph::save_snapshot;
use depinfer::{KnowledgeGraph, PackageKey, System};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("depinfer-kb"));

    let wheels = [
        WheelMetadataRecord {
            name: "biopython".into(),
            version: "1.70".into(),
            top_level: vec!["Bio".into(), "BioSQL".into()],
        },
        WheelMetadataRecord {
            name: "numpy".into(),
            version: "1.14.0".into(),
            top_level: vec!["numpy".into()],
        },
    ];
    let probes = [ProbeOutput {
        package: "PyHum".into(),
        version: "1.4.6".into(),
        log: "ImportError: No module named numpy. Please install numpy first.".into(),
    }];

    let mut graph = KnowledgeGraph::new();
    println!("wheels: {}", ingest(&mut graph, &wheels)?);
    println!("probes: {}", ingest(&mut graph, &probes)?);

    let pyhum = PackageKey::new(System::Pip, "PyHum")?;
    for dep in graph.dependency_neighbors(&pyhum)? {
        println!("{pyhum} depends on {dep}");
    }
    for owner in graph.find_packages_by_resource_prefix("Bio.Seq") {
        println!("Bio.Seq is provided by {owner}");
    }

    save_snapshot(&graph, &dir)?;
    println!("snapshot written to {}", dir.display());
    Ok(())
}
