//! The `depinfer` command line: `infer`, `ingest`, `mine` and `stats`.
//!
//! Exit codes: 0 success, 1 input error, 2 knowledge-base error. Only the
//! artifact goes to stdout; diagnostics go to stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use walkdir::WalkDir;

use crate::acquisition::{
    append_transactions, extract_dockerfile_packages, extract_requirements_packages, ingest,
    is_requirements_file_name, parse_wheel_toplevel, read_transactions, run_probe, IngestCounts,
    ProbeOutput, Transaction, WheelMetadataRecord,
};
use crate::emitter::{render, DockerfileSpec, DEFAULT_BASE_IMAGE};
use crate::graph::{load_snapshot, save_snapshot, KnowledgeGraph, EDGES_FILE, NODES_FILE};
use crate::inference::{infer, InferenceConfig};
use crate::mining::{install_rules, mine_rules, MiningConfig, RULE_LENGTH};
use crate::package::{PackageKey, System};
use crate::registry::{
    AptNameList, EmptyBackend, PipFixture, PypiJsonApi, Registry, RegistryBackend, DEFAULT_TIMEOUT,
    INDEX_URL_ENV,
};
use crate::snippet::{StdlibManifest, DEFAULT_PYTHON_VERSION};

pub const PIP_FIXTURE_FILE: &str = "pypi.json";
pub const APT_NAMES_FILE: &str = "apt-names.txt";
pub const TRANSACTIONS_FILE: &str = "transactions.txt";

#[derive(Debug, Parser)]
#[command(
    name = "depinfer",
    version,
    about = "Infer the packages a Python snippet needs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a Dockerfile (or plan JSON) for a snippet.
    Infer(InferArgs),
    /// Add knowledge to a KB snapshot or transactions file.
    Ingest(IngestArgs),
    /// Mine association rules from a transactions file.
    Mine(MineArgs),
    /// Print node and edge counts of a KB snapshot.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Dockerfile,
    Json,
}

#[derive(Debug, Args)]
pub struct RegistryArgs {
    /// Use fixture and name-list backends only (the default).
    #[arg(long, conflicts_with = "online")]
    pub offline: bool,
    /// Query the live pip index.
    #[arg(long)]
    pub online: bool,
    /// pip fixture; defaults to <kb>/pypi.json when present.
    #[arg(long)]
    pub pip_fixture: Option<PathBuf>,
    /// apt name list; defaults to <kb>/apt-names.txt when present.
    #[arg(long)]
    pub apt_names: Option<PathBuf>,
    /// Live index base URL (also read from DEPINFER_INDEX_URL).
    #[arg(long)]
    pub index_url: Option<String>,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    pub snippet: PathBuf,
    #[arg(long, default_value = "kb")]
    pub kb: PathBuf,
    #[command(flatten)]
    pub registry: RegistryArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Dockerfile)]
    pub format: OutputFormat,
    #[arg(long, default_value = DEFAULT_BASE_IMAGE)]
    pub base_image: String,
    /// Python version whose standard library is filtered out.
    #[arg(long, default_value = DEFAULT_PYTHON_VERSION)]
    pub python: String,
    /// Directory holding stdlib-<version>.json manifests.
    #[arg(long)]
    pub stdlib_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub min_association_confidence: f64,
    /// Write the output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceKind {
    /// `.whl` archives or JSONL of {name, version, top_level}.
    Wheels,
    /// JSONL of {package, version, log}, or `name==version` with --probe-command.
    ProbeLogs,
    /// Dockerfiles, plus requirements files found next to them; one
    /// transaction per directory.
    Dockerfiles,
    /// requirements*.txt files; one transaction per directory.
    Requirements,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(value_enum)]
    pub kind: SourceKind,
    /// Files or directories.
    pub paths: Vec<PathBuf>,
    #[arg(long, default_value = "kb")]
    pub kb: PathBuf,
    /// Transactions file; defaults to <kb>/transactions.txt.
    #[arg(long)]
    pub transactions: Option<PathBuf>,
    /// Accept every extracted package name without checking the registry.
    #[arg(long)]
    pub no_validate: bool,
    /// Command run per `name==version` argument; `{package}` is replaced.
    #[arg(long)]
    pub probe_command: Option<String>,
    #[command(flatten)]
    pub registry: RegistryArgs,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub transactions: PathBuf,
    #[arg(long, default_value_t = crate::mining::DEFAULT_MIN_CONFIDENCE)]
    pub min_confidence: f64,
    #[arg(long, default_value_t = crate::mining::DEFAULT_MIN_SUPPORT_COUNT)]
    pub min_support_count: u64,
    /// Write the rules as JSONL.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Install the rules into this KB snapshot.
    #[arg(long)]
    pub kb: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, default_value = "kb")]
    pub kb: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Kb(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 1,
            Self::Kb(_) => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn input(message: impl Into<String>) -> CliError {
    CliError::Input(message.into())
}

fn kb(message: impl Into<String>) -> CliError {
    CliError::Kb(message.into())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Infer(args) => cmd_infer(&args, stdout, stderr),
        Command::Ingest(args) => cmd_ingest(&args, stdout, stderr),
        Command::Mine(args) => cmd_mine(&args, stdout),
        Command::Stats(args) => cmd_stats(&args, stdout),
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| input(format!("writing output: {e}"))),
    }
}

/// Loads an existing KB directory. Missing snapshot files inside it mean an
/// empty graph.
fn load_kb(dir: &Path) -> CliResult<KnowledgeGraph> {
    if !dir.is_dir() {
        return Err(kb(format!(
            "{}: knowledge base directory not found",
            dir.display()
        )));
    }
    if !dir.join(NODES_FILE).exists() && !dir.join(EDGES_FILE).exists() {
        return Ok(KnowledgeGraph::new());
    }
    load_snapshot(dir).map_err(|e| kb(e.to_string()))
}

/// Like [`load_kb`], but a missing directory is an empty graph.
fn load_or_create_kb(dir: &Path) -> CliResult<KnowledgeGraph> {
    if dir.exists() {
        load_kb(dir)
    } else {
        Ok(KnowledgeGraph::new())
    }
}

fn build_registry(args: &RegistryArgs, kb_dir: &Path) -> CliResult<Registry> {
    let file_or_default =
        |explicit: &Option<PathBuf>, default: &str| -> CliResult<Option<PathBuf>> {
            match explicit {
                Some(p) if !p.exists() => Err(input(format!("{}: not found", p.display()))),
                Some(p) => Ok(Some(p.clone())),
                None => {
                    let p = kb_dir.join(default);
                    Ok(p.exists().then_some(p))
                }
            }
        };
    let pip: Box<dyn RegistryBackend> = if args.online {
        match &args.index_url {
            Some(url) => Box::new(PypiJsonApi::new(url, DEFAULT_TIMEOUT)),
            None => Box::new(PypiJsonApi::from_env()),
        }
    } else {
        match file_or_default(&args.pip_fixture, PIP_FIXTURE_FILE)? {
            Some(p) => Box::new(PipFixture::load(&p).map_err(|e| kb(e.to_string()))?),
            None => Box::new(EmptyBackend),
        }
    };
    let apt: Box<dyn RegistryBackend> = match file_or_default(&args.apt_names, APT_NAMES_FILE)? {
        Some(p) => Box::new(AptNameList::load(&p).map_err(|e| kb(e.to_string()))?),
        None => Box::new(EmptyBackend),
    };
    if !args.online && args.index_url.is_some() {
        log::warn!("--index-url has no effect without --online ({INDEX_URL_ENV} likewise)");
    }
    Ok(Registry::new(pip, apt))
}

pub fn cmd_infer(
    args: &InferArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let source = fs::read_to_string(&args.snippet)
        .map_err(|e| input(format!("{}: {e}", args.snippet.display())))?;
    if !(0.0..=1.0).contains(&args.min_association_confidence) {
        return Err(input("--min-association-confidence must be within [0, 1]"));
    }
    let stdlib = match &args.stdlib_dir {
        Some(dir) => StdlibManifest::load(dir, &args.python),
        None => StdlibManifest::bundled(&args.python),
    }
    .map_err(|e| input(e.to_string()))?;
    let snippet_name = args
        .snippet
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    // validate before the expensive part
    DockerfileSpec::new(&args.base_image, &snippet_name, Default::default())
        .map_err(|e| input(e.to_string()))?;

    let graph = load_kb(&args.kb)?;
    let registry = build_registry(&args.registry, &args.kb)?;
    let config = InferenceConfig {
        stdlib,
        min_association_confidence: args.min_association_confidence,
    };
    let plan = infer(&source, &graph, &registry, &config);
    for w in &plan.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let text = match args.format {
        OutputFormat::Json => plan.to_json(),
        OutputFormat::Dockerfile => {
            let spec = DockerfileSpec::new(&args.base_image, &snippet_name, plan)
                .map_err(|e| input(e.to_string()))?;
            render(&spec)
        }
    };
    emit(args.out.as_deref(), &text, stdout)
}

/// Files under `paths`, directories walked in name order, filtered by
/// `wanted`. Explicitly named files are always included.
fn collect_files(paths: &[PathBuf], wanted: impl Fn(&Path) -> bool) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            for entry in WalkDir::new(path).sort_by_file_name() {
                let entry = entry.map_err(|e| input(e.to_string()))?;
                if entry.file_type().is_file() && wanted(entry.path()) {
                    files.push(entry.into_path());
                }
            }
        } else if path.is_file() {
            files.push(path.clone());
        } else {
            return Err(input(format!("{}: not found", path.display())));
        }
    }
    Ok(files)
}

fn has_extension(path: &Path, exts: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| exts.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn parse_jsonl<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> CliResult<Vec<T>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line)
            .map_err(|e| input(format!("{}:{}: {e}", path.display(), idx + 1)))?;
        out.push(record);
    }
    Ok(out)
}

fn is_dockerfile(path: &Path) -> bool {
    let name = file_name(path);
    name.starts_with("Dockerfile") || name.ends_with(".dockerfile") || name.ends_with(".Dockerfile")
}

pub fn cmd_ingest(
    args: &IngestArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let mut graph = load_or_create_kb(&args.kb)?;
    let before = graph.stats();
    let mut graph_changed = false;
    let mut transactions_written = 0;

    match args.kind {
        SourceKind::Wheels => {
            let files = collect_files(&args.paths, |p| has_extension(p, &["whl", "jsonl"]))?;
            let mut records = Vec::new();
            for file in files {
                if has_extension(&file, &["whl"]) {
                    let bytes =
                        fs::read(&file).map_err(|e| input(format!("{}: {e}", file.display())))?;
                    let record = parse_wheel_toplevel(&bytes)
                        .map_err(|e| input(format!("{}: {e}", file.display())))?;
                    records.push(record);
                } else {
                    records.extend(parse_jsonl::<WheelMetadataRecord>(&file)?);
                }
            }
            ingest(&mut graph, &records).map_err(|e| input(e.to_string()))?;
            graph_changed = !records.is_empty();
        }
        SourceKind::ProbeLogs => {
            let mut records: Vec<ProbeOutput> = Vec::new();
            if let Some(template) = &args.probe_command {
                for spec in &args.paths {
                    let spec = spec.to_string_lossy();
                    let (name, version) = spec
                        .split_once("==")
                        .ok_or_else(|| input(format!("{spec:?}: expected name==version")))?;
                    let key =
                        PackageKey::new(System::Pip, name).map_err(|e| input(e.to_string()))?;
                    let log = run_probe(template, &key).map_err(|e| input(e.to_string()))?;
                    records.push(ProbeOutput {
                        package: name.to_string(),
                        version: version.to_string(),
                        log,
                    });
                }
            } else {
                for file in collect_files(&args.paths, |p| has_extension(p, &["jsonl"]))? {
                    records.extend(parse_jsonl::<ProbeOutput>(&file)?);
                }
            }
            ingest(&mut graph, &records).map_err(|e| input(e.to_string()))?;
            graph_changed = !records.is_empty();
        }
        SourceKind::Dockerfiles | SourceKind::Requirements => {
            let registry = if args.no_validate {
                None
            } else {
                Some(build_registry(&args.registry, &args.kb)?)
            };
            let accept_all = |_: &str| true;
            let mut per_project: BTreeMap<PathBuf, Transaction> = BTreeMap::new();
            let dockerfiles = args.kind == SourceKind::Dockerfiles;
            let files = if dockerfiles {
                // a project's requirements files belong to its transaction
                collect_files(&args.paths, |p| {
                    is_dockerfile(p) || is_requirements_file_name(&file_name(p))
                })?
            } else {
                collect_files(&args.paths, |p| is_requirements_file_name(&file_name(p)))?
            };
            for file in files {
                let text = read_text(&file)?;
                let as_dockerfile = dockerfiles && !is_requirements_file_name(&file_name(&file));
                let transaction = match (&registry, as_dockerfile) {
                    (Some(r), true) => extract_dockerfile_packages(
                        &text,
                        r.known(System::Apt),
                        r.known(System::Pip),
                    ),
                    (None, true) => extract_dockerfile_packages(&text, accept_all, accept_all),
                    (reg, false) => {
                        let name = file_name(&file);
                        if !is_requirements_file_name(&name) {
                            let _ = writeln!(
                                stderr,
                                "warning: {}: not a requirements file name; skipped",
                                file.display()
                            );
                        }
                        let items = match reg {
                            Some(r) => {
                                extract_requirements_packages(&name, &text, r.known(System::Pip))
                            }
                            None => extract_requirements_packages(&name, &text, accept_all),
                        };
                        Transaction::new(items).map_err(|e| input(e.to_string()))?
                    }
                };
                let project = file.parent().map(Path::to_path_buf).unwrap_or_default();
                per_project.entry(project).or_default().extend(transaction);
            }
            let transactions: Vec<Transaction> = per_project.into_values().collect();
            let path = args
                .transactions
                .clone()
                .unwrap_or_else(|| args.kb.join(TRANSACTIONS_FILE));
            if transactions.iter().any(|t| !t.is_empty()) {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent)
                        .map_err(|e| input(format!("{}: {e}", parent.display())))?;
                }
                transactions_written = append_transactions(&path, &transactions)
                    .map_err(|e| input(format!("{}: {e}", path.display())))?;
            }
        }
    }

    if graph_changed {
        save_snapshot(&graph, &args.kb).map_err(|e| kb(e.to_string()))?;
    }
    let mut counts = IngestCounts::between(before, graph.stats());
    counts.transactions = transactions_written;
    writeln!(stdout, "{counts}").map_err(|e| input(e.to_string()))
}

pub fn cmd_mine(args: &MineArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let transactions = read_transactions(&args.transactions).map_err(|e| input(e.to_string()))?;
    if transactions.is_empty() {
        return Err(input(format!(
            "{}: no transactions",
            args.transactions.display()
        )));
    }
    let config = MiningConfig {
        min_confidence: args.min_confidence,
        max_rule_length: RULE_LENGTH,
        min_support_count: args.min_support_count,
    };
    let rules = mine_rules(&transactions, &config).map_err(|e| input(e.to_string()))?;
    if let Some(out) = &args.out {
        let mut text = String::new();
        for rule in &rules {
            let record = rule.to_record().map_err(|e| input(e.to_string()))?;
            text.push_str(&serde_json::to_string(&record).expect("records serialize"));
            text.push('\n');
        }
        fs::write(out, text).map_err(|e| input(format!("{}: {e}", out.display())))?;
    }
    if let Some(dir) = &args.kb {
        let mut graph = load_or_create_kb(dir)?;
        install_rules(&rules, &mut graph).map_err(|e| kb(e.to_string()))?;
        save_snapshot(&graph, dir).map_err(|e| kb(e.to_string()))?;
    }
    let noun = if rules.len() == 1 { "rule" } else { "rules" };
    writeln!(stdout, "{} {noun}", rules.len()).map_err(|e| input(e.to_string()))
}

pub fn cmd_stats(args: &StatsArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let stats = load_kb(&args.kb)?.stats();
    let text = format!(
        "packages {}\nversions {}\nresources {}\nassociations {}\nresource_dependencies {}\n",
        stats.packages,
        stats.versions,
        stats.resources,
        stats.associations,
        stats.resource_dependencies
    );
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| input(e.to_string()))
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
