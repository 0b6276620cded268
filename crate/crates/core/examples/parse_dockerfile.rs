//! Extract the apt/pip packages a Dockerfile installs, as a mining
//! transaction.
//!
//!     cargo run --example parse_dockerfile -- [Dockerfile]

use depinfer::acquisition::{extract_dockerfile_packages, run_commands, split_commands};

const SAMPLE: &str = r#"FROM python:2.7
RUN apt-get update \
    && apt-get install -y --no-install-recommends libmemcached-dev \
    && rm -rf /var/lib/apt/lists/*
RUN ["pip","install","pylibmc"]
RUN pip install -r requirements.txt; pip install "raven[flask]>=6"
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => SAMPLE.to_string(),
    };
    for run in run_commands(&text) {
        println!("RUN {run}");
        for command in split_commands(&run) {
            println!("    {command}");
        }
    }
    // accept every name; a real ingest checks a registry
    let transaction = extract_dockerfile_packages(&text, |_| true, |_| true);
    println!("transaction: {transaction}");
    Ok(())
}
