//! Render a hand-built install plan as a Dockerfile.
//!
//!     cargo run --example render_dockerfile

use depinfer::emitter::{render, DockerfileSpec};
use depinfer::inference::{InstallPlan, PlanEntry, Provenance};
use depinfer::{PackageKey, System};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plan = InstallPlan {
        entries: vec![
            PlanEntry {
                key: PackageKey::new(System::Apt, "libmemcached-dev")?,
                display_name: "libmemcached-dev".into(),
                provenance: Provenance::TransitiveAssociation,
            },
            PlanEntry {
                key: PackageKey::new(System::Pip, "pylibmc")?,
                display_name: "pylibmc".into(),
                provenance: Provenance::DirectExactResource,
            },
        ],
        warnings: vec![],
    };
    print!(
        "{}",
        render(&DockerfileSpec::new("python:2.7.13", "snippet.py", plan)?)
    );
    Ok(())
}
