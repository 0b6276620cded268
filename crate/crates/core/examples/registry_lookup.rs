//! Ask whether packages exist and can be installed.
//!
//!     cargo run --example registry_lookup -- PIL Pillow dashtable
//!     cargo run --example registry_lookup -- --online requests
//!
//! Offline lookups use a small built-in fixture; `--online` queries the
//! index named by DEPINFER_INDEX_URL (PyPI by default).

use depinfer::registry::{AptNameList, EmptyBackend, PipFixture, PypiJsonApi, Registry};
use depinfer::System;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut names: Vec<String> = std::env::args().skip(1).collect();
    let online = names.first().is_some_and(|a| a == "--online");
    if online {
        names.remove(0);
    }
    if names.is_empty() {
        names = vec!["PIL".into(), "Pillow".into(), "nonexistent-xyzzy".into()];
    }

    let registry = if online {
        Registry::new(Box::new(PypiJsonApi::from_env()), Box::new(EmptyBackend))
    } else {
        let fixture = PipFixture::from_json(
            r#"{"PIL":{"releases":0},"Pillow":{"releases":48},"dashtable":{"releases":6}}"#,
        )?;
        Registry::offline(
            fixture,
            AptNameList::parse("libpcap-dev\nlibmemcached-dev\n"),
        )
    };
    for name in &names {
        match registry.query(System::Pip, name) {
            Ok(a) => println!(
                "{name:<20} exists={} installable={} ({})",
                a.exists, a.has_installable_version, a.canonical_name
            ),
            Err(e) => println!("{name:<20} lookup failed: {e}"),
        }
    }
    Ok(())
}
