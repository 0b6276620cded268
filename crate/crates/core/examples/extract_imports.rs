//! List the non-standard-library resources a Python snippet imports.
//!
//!     cargo run --example extract_imports -- [snippet.py] [python-version]

use depinfer::snippet::{extract_imports, filter_stdlib, StdlibManifest};

const SAMPLE: &str = "\
import os, sys
import numpy as np
from flask import Flask, request
from .local import helper
try:
    import simplejson as json
except ImportError:
    import json
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let source = match args.next() {
        Some(path) => std::fs::read_to_string(path)?,
        None => SAMPLE.to_string(),
    };
    let version = args.next().unwrap_or_else(|| "2.7".to_string());
    let manifest = StdlibManifest::bundled(&version)?;

    let all = extract_imports(&source);
    println!("imports:");
    for r in &all {
        println!("  {:<24} {:?}", r.name, r.origin);
    }
    println!("outside the Python {version} standard library:");
    for r in filter_stdlib(all, &manifest) {
        println!("  {}", r.name);
    }
    Ok(())
}
