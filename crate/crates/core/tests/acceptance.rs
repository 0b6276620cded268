//! Acceptance gate: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use depinfer::acquisition::{extract_dockerfile_packages, Transaction};
use depinfer::emitter::{render, DockerfileSpec};
use depinfer::graph::{load_snapshot, save_snapshot};
use depinfer::inference::{infer, install_order, InferenceConfig};
use depinfer::mining::{mine_rules, MiningConfig};
use depinfer::registry::{AptNameList, PipFixture, Registry};
use depinfer::snippet::extract_imports;
use depinfer::PackageKey;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::generators::{random_cyclic_kb, random_kb, random_rich_graph, random_transactions};
use common::oracles::{oracle_mine, oracle_reachable, oracle_topo_check};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn scenario_output(dir: &Path) -> Result<(String, String), String> {
    let kb = dir.join("kb");
    let graph = load_snapshot(&kb).map_err(|e| e.to_string())?;
    let pip = PipFixture::load(&kb.join("pypi.json")).map_err(|e| e.to_string())?;
    let apt = AptNameList::load(&kb.join("apt-names.txt")).map_err(|e| e.to_string())?;
    let registry = Registry::offline(pip, apt);
    let plan = infer(
        &read(&dir.join("snippet.py")),
        &graph,
        &registry,
        &InferenceConfig::default(),
    );
    let json = plan.to_json();
    let base = read(&dir.join("base-image.txt"));
    let spec = DockerfileSpec::new(base.trim(), "snippet.py", plan).map_err(|e| e.to_string())?;
    Ok((render(&spec), json))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let dirs = common::scenario_dirs();
    ensure(dirs.len() == 6, || {
        format!("expected 6 scenarios, found {}", dirs.len())
    })?;
    for dir in &dirs {
        let name = dir.file_name().unwrap().to_string_lossy().into_owned();
        let (dockerfile, json) = scenario_output(dir)?;
        ensure(dockerfile == read(&dir.join("Dockerfile")), || {
            format!("{name}: Dockerfile differs:\n{dockerfile}")
        })?;
        ensure(json == read(&dir.join("expected_plan.json")), || {
            format!("{name}: plan differs:\n{json}")
        })?;
        if name == "pcapy-impacket" {
            let apt = dockerfile.find("\"libpcap-dev\"").unwrap_or(usize::MAX);
            let pcapy = dockerfile.find("\"pcapy\"").unwrap_or(0);
            ensure(apt < pcapy, || "libpcap-dev not before pcapy".into())?;
        }
        if name == "pil-pillow" {
            ensure(
                dockerfile.contains("\"Pillow\"") && !dockerfile.contains("\"PIL\""),
                || "PIL scenario must install Pillow and never PIL".into(),
            )?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} scenarios byte-identical in {elapsed:?}",
        dirs.len()
    ))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2002);
    let mut total_rules = 0;
    for case in 0..200 {
        let transactions = random_transactions(&mut rng, 12, 64);
        let config = MiningConfig {
            min_confidence: rng.gen_range(0.05..=1.0),
            min_support_count: rng.gen_range(1..=6),
            ..MiningConfig::default()
        };
        let mined = mine_rules(&transactions, &config).map_err(|e| e.to_string())?;
        let mut expected = oracle_mine(&transactions, &config)?;
        expected
            .sort_by(|a, b| (&a.antecedent, &a.consequent).cmp(&(&b.antecedent, &b.consequent)));
        let got: Vec<_> = mined
            .iter()
            .map(|r| (&r.antecedent, &r.consequent, r.count))
            .collect();
        let want: Vec<_> = expected
            .iter()
            .map(|r| (&r.antecedent, &r.consequent, r.count))
            .collect();
        ensure(got == want, || format!("case {case}: rule sets differ"))?;
        for (m, o) in mined.iter().zip(&expected) {
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
            ensure(
                close(m.support, o.support)
                    && close(m.confidence, o.confidence)
                    && close(m.lift, o.lift),
                || {
                    format!(
                        "case {case}: metrics differ for {} -> {}",
                        m.antecedent, m.consequent
                    )
                },
            )?;
        }
        total_rules += mined.len();
    }
    Ok(format!(
        "200 corpora match the oracle ({total_rules} rules)"
    ))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3003);
    for case in 0..500 {
        let n = rng.gen_range(1..=50);
        let p = rng.gen_range(0.0..0.2);
        let kb = random_kb(&mut rng, n, p, true);
        let roots = kb.random_roots(&mut rng);
        let plan = install_order(&roots, &kb.graph);
        let edges = kb.key_edges();
        ensure(oracle_topo_check(&plan, &edges), || {
            format!("case {case}: order violated")
        })?;
        let entries: BTreeSet<PackageKey> = plan.iter().cloned().collect();
        ensure(entries.len() == plan.len(), || {
            format!("case {case}: duplicate entry")
        })?;
        ensure(entries == oracle_reachable(&roots, &edges), || {
            format!("case {case}: coverage differs")
        })?;
    }
    Ok("500 acyclic graphs ordered and complete".into())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4004);
    for case in 0..200 {
        let n = rng.gen_range(2..=50);
        let p = rng.gen_range(0.0..0.3);
        let kb = random_cyclic_kb(&mut rng, n, p);
        let mut roots = kb.random_roots(&mut rng);
        if roots.is_empty() {
            roots.push(kb.keys[0].clone());
        }
        let plan = install_order(&roots, &kb.graph);
        let entries: BTreeSet<PackageKey> = plan.iter().cloned().collect();
        ensure(entries.len() == plan.len(), || {
            format!("case {case}: a package was emitted twice")
        })?;
        ensure(entries == oracle_reachable(&roots, &kb.key_edges()), || {
            format!("case {case}: coverage differs")
        })?;
    }
    Ok("200 cyclic graphs terminate, each package once".into())
}

fn accept_all(_: &str) -> bool {
    true
}

fn dockerfile_items(text: &str) -> Vec<String> {
    extract_dockerfile_packages(text, accept_all, accept_all)
        .items()
        .map(String::from)
        .collect()
}

fn criterion_5() -> Outcome {
    let dir = common::fixtures_dir().join("dockerfiles");
    let labels: std::collections::BTreeMap<String, Vec<String>> =
        serde_json::from_str(&read(&dir.join("labels.json"))).map_err(|e| e.to_string())?;
    ensure(labels.len() >= 30, || {
        format!("only {} labeled Dockerfiles", labels.len())
    })?;
    for (file, expected) in &labels {
        let got = dockerfile_items(&read(&dir.join(file)));
        ensure(&got == expected, || {
            format!("{file}: got {got:?}, labeled {expected:?}")
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5005);
    let pool = [
        "requests",
        "Flask",
        "lxml",
        "PyYAML",
        "numpy==1.14",
        "libpq-dev",
        "gcc",
        "zlib1g-dev",
        "curl",
    ];
    for case in 0..100 {
        let mut commands: Vec<Vec<String>> = Vec::new();
        for _ in 0..rng.gen_range(1..6) {
            let k = rng.gen_range(1..4);
            let names: Vec<String> = pool
                .choose_multiple(&mut rng, k)
                .map(|s| s.to_string())
                .collect();
            let mut words: Vec<String> = match rng.gen_range(0..3) {
                0 => vec!["apt-get".into(), "install".into(), "-y".into()],
                1 => vec!["pip".into(), "install".into()],
                _ => vec!["echo".into()],
            };
            if rng.gen_bool(0.3) && words[0] == "pip" {
                words.push("--no-cache-dir".into());
            }
            words.extend(names);
            commands.push(words);
        }
        let mut shell = String::from("FROM base\nRUN ");
        for (i, words) in commands.iter().enumerate() {
            if i > 0 {
                shell.push_str([" && ", " ; ", " || ", " && \\\n    "][rng.gen_range(0..4)]);
            }
            shell.push_str(&words.join(" "));
        }
        shell.push('\n');
        let mut exec = String::from("FROM base\n");
        for words in &commands {
            exec.push_str(&format!("RUN {}\n", serde_json::to_string(words).unwrap()));
        }
        let shell_items = dockerfile_items(&shell);
        ensure(shell_items == dockerfile_items(&exec), || {
            format!("case {case}: exec and shell forms differ\n{shell}\n{exec}")
        })?;
        let wrapped = format!(
            "FROM base\nRUN {}\n",
            serde_json::to_string(&["/bin/sh", "-c", &shell[14..].replace("\\\n", "")]).unwrap()
        );
        ensure(shell_items == dockerfile_items(&wrapped), || {
            format!("case {case}: sh -c form differs")
        })?;
    }
    Ok(format!(
        "{} labeled Dockerfiles match; 100 exec/shell sets agree",
        labels.len()
    ))
}

fn criterion_6() -> Outcome {
    let dir = common::fixtures_dir().join("snippets");
    let labels: std::collections::BTreeMap<String, Vec<String>> =
        serde_json::from_str(&read(&dir.join("labels.json"))).map_err(|e| e.to_string())?;
    ensure(labels.len() >= 25, || {
        format!("only {} labeled snippets", labels.len())
    })?;
    for (file, expected) in &labels {
        let got: Vec<String> = extract_imports(&read(&dir.join(file)))
            .into_iter()
            .map(|r| r.name)
            .collect();
        ensure(&got == expected, || {
            format!("{file}: got {got:?}, labeled {expected:?}")
        })?;
    }
    let fig = read(&common::fixtures_dir().join("scenarios/pcapy-impacket/snippet.py"));
    let got: Vec<String> = extract_imports(&fig).into_iter().map(|r| r.name).collect();
    ensure(got == ["pcapy", "impacket.ImpactDecoder"], || {
        format!("packet-capture snippet gave {got:?}")
    })?;
    Ok(format!("{} labeled snippets match", labels.len()))
}

fn criterion_7() -> Outcome {
    let c = MiningConfig::default();
    ensure(c.min_confidence == 0.8, || {
        format!("min_confidence {}", c.min_confidence)
    })?;
    ensure(c.max_rule_length == 2, || {
        format!("rule length {}", c.max_rule_length)
    })?;
    ensure(c.min_support_count == 3, || {
        format!("support count {}", c.min_support_count)
    })?;
    // the floor is enforced, not just declared
    let twice = vec![Transaction::new(["pip_a", "pip_b"]).unwrap(); 2];
    ensure(
        mine_rules(&twice, &c)
            .map_err(|e| e.to_string())?
            .is_empty(),
        || "support floor not applied".into(),
    )?;
    Ok("min_confidence 0.8, rule length 2, support count 3".into())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x8008);
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for case in 0..100 {
        let g = random_rich_graph(&mut rng);
        let dir = tmp.path().join(format!("g{case}"));
        save_snapshot(&g, &dir).map_err(|e| e.to_string())?;
        let back = load_snapshot(&dir).map_err(|e| e.to_string())?;
        ensure(back == g, || {
            format!("case {case}: graph changed across save/load")
        })?;
    }
    Ok("100 random graphs round-trip".into())
}

fn criterion_9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_depinfer");
    let mut runs = 0;
    for dir in common::scenario_dirs() {
        let base = read(&dir.join("base-image.txt"));
        for format in ["dockerfile", "json"] {
            let run = || {
                Command::new(bin)
                    .args([
                        "infer",
                        "--offline",
                        "--format",
                        format,
                        "--base-image",
                        base.trim(),
                        "--kb",
                    ])
                    .arg(dir.join("kb"))
                    .arg(dir.join("snippet.py"))
                    .output()
                    .map_err(|e| e.to_string())
            };
            let first = run()?;
            ensure(first.status.success(), || {
                format!("{}: exit {:?}", dir.display(), first.status)
            })?;
            for _ in 0..2 {
                let again = run()?;
                ensure(again.stdout == first.stdout, || {
                    format!("{}: {format} output varies", dir.display())
                })?;
                runs += 1;
            }
            let golden = if format == "json" {
                "expected_plan.json"
            } else {
                "Dockerfile"
            };
            ensure(first.stdout == read(&dir.join(golden)).into_bytes(), || {
                format!("{}: binary output differs from {golden}", dir.display())
            })?;
        }
    }
    Ok(format!("{runs} repeated invocations byte-identical"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden scenarios", criterion_1),
        ("mining oracle equivalence", criterion_2),
        ("install order on acyclic graphs", criterion_3),
        ("cycle termination", criterion_4),
        ("Dockerfile parser corpus", criterion_5),
        ("import extraction corpus", criterion_6),
        ("default mining thresholds", criterion_7),
        ("snapshot round-trip", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
