//! Infer an install plan and Dockerfile for a snippet against a KB snapshot.
//!
//!     cargo run --example infer_snippet -- [snippet.py] [kb-dir]
//!
//! Defaults to the packet-capture scenario shipped under `fixtures/`.

use std::path::{Path, PathBuf};

use depinfer::emitter::{render, DockerfileSpec};
use depinfer::graph::load_snapshot;
use depinfer::inference::{infer, InferenceConfig};
use depinfer::registry::{AptNameList, PipFixture, Registry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenarios/pcapy-impacket");
    let mut args = std::env::args().skip(1);
    let snippet = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| scenario.join("snippet.py"));
    let kb = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| scenario.join("kb"));

    let graph = load_snapshot(&kb)?;
    let pip = match kb.join("pypi.json") {
        p if p.exists() => PipFixture::load(&p)?,
        _ => PipFixture::default(),
    };
    let apt = match kb.join("apt-names.txt") {
        p if p.exists() => AptNameList::load(&p)?,
        _ => AptNameList::default(),
    };
    let registry = Registry::offline(pip, apt);

    let source = std::fs::read_to_string(&snippet)?;
    let plan = infer(&source, &graph, &registry, &InferenceConfig::default());
    for entry in &plan.entries {
        eprintln!("{:<24} {:?}", entry.key.to_string(), entry.provenance);
    }
    for w in &plan.warnings {
        eprintln!("warning: {w}");
    }
    let name = snippet
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("snippet.py");
    print!(
        "{}",
        render(&DockerfileSpec::new("python:2.7.14", name, plan)?)
    );
    Ok(())
}
