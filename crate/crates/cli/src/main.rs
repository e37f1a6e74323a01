//! `qlgraph`: build QL bit graphs, products and spectra, and rerun the
//! numerical experiments, writing every output together with a manifest.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qlgraph::QlError;

use manifest::{manifest_path, Artifacts, RunManifest, TOOL_VERSION};

#[derive(Debug, Parser)]
#[command(name = "qlgraph", version, about = "Quantum-like bit graphs and their experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a QL bit graph.
    Build(commands::BuildArgs),
    /// Eigenvalues, emergent state and spectrum histogram of a graph.
    Spectrum(commands::SpectrumArgs),
    /// Cartesian or optimized product of graphs.
    Product(commands::ProductArgs),
    /// Concurrence experiments on two-bit products.
    Concurrence(commands::ConcurrenceArgs),
    /// Phase oscillator simulation on a graph.
    Simulate(commands::SimulateArgs),
    /// Phase-constraint cloning check.
    Nocloning(commands::NoCloningArgs),
    /// Boolean lattice and its Hasse diagram.
    Poset(commands::PosetArgs),
    /// Convert between Jones vectors, quaternions and SU(2) matrices.
    Su2(commands::Su2Args),
    /// Rerun a manifest and compare artifact checksums.
    Replay(ReplayArgs),
}

#[derive(Debug, clap::Args)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Also rewrite the artifacts.
    #[arg(long)]
    write: bool,
}

#[derive(Debug)]
pub enum CliError {
    Core(QlError),
    Usage(String),
    Parse(String),
    Io(std::io::Error),
}

impl From<QlError> for CliError {
    fn from(e: QlError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl CliError {
    /// 2 validation, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_io() => 4,
            CliError::Core(QlError::Json(_)) => 4,
            CliError::Core(QlError::RejectionsExhausted { .. }) => 3,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Parse(_) | CliError::Io(_) => 4,
        }
    }
}

/// What a command hands back: its files plus the manifest fields.
pub struct Run {
    pub primary: PathBuf,
    pub artifacts: Artifacts,
    pub params: serde_json::Value,
    pub seeds: Vec<u64>,
    pub summary: Option<String>,
}

fn execute(command: &Command) -> Result<(&'static str, Run), CliError> {
    Ok(match command {
        Command::Build(a) => ("build", commands::build(a)?),
        Command::Spectrum(a) => ("spectrum", commands::spectrum(a)?),
        Command::Product(a) => ("product", commands::product(a)?),
        Command::Concurrence(a) => ("concurrence", commands::concurrence(a)?),
        Command::Simulate(a) => ("simulate", commands::simulate(a)?),
        Command::Nocloning(a) => ("nocloning", commands::nocloning(a)?),
        Command::Poset(a) => ("poset", commands::poset(a)?),
        Command::Su2(a) => ("su2", commands::su2(a)?),
        Command::Replay(_) => return Err(CliError::Usage("replay cannot be nested".into())),
    })
}

fn run_and_record(argv: Vec<String>, command: &Command) -> Result<Option<String>, CliError> {
    let (name, run) = execute(command)?;
    let manifest = RunManifest {
        command: name.to_string(),
        tool_version: TOOL_VERSION.to_string(),
        argv,
        params: run.params,
        seeds: run.seeds,
        artifacts: run.artifacts.checksums(),
    };
    let mut artifacts = run.artifacts;
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    artifacts.add(manifest_path(&run.primary), text);
    artifacts.commit()?;
    Ok(run.summary)
}

fn replay(args: &ReplayArgs) -> Result<Option<String>, CliError> {
    let m = RunManifest::read(&args.manifest)?;
    let mut full = vec!["qlgraph".to_string()];
    full.extend(m.argv.iter().cloned());
    let cli = Cli::try_parse_from(&full).map_err(|e| CliError::Parse(format!("manifest argv: {e}")))?;
    if let Command::Replay(_) = cli.command {
        return Err(CliError::Usage("a manifest cannot replay another manifest".into()));
    }
    let (_, run) = execute(&cli.command)?;
    let got = run.artifacts.checksums();
    let mut report = Vec::new();
    let mut mismatched = 0;
    for (path, want) in &m.artifacts {
        let status = match got.get(path) {
            Some(h) if h == want => "match",
            Some(_) => {
                mismatched += 1;
                "MISMATCH"
            }
            None => {
                mismatched += 1;
                "MISSING"
            }
        };
        report.push(format!("{status} {path}"));
    }
    if mismatched > 0 {
        return Err(CliError::Usage(format!(
            "{mismatched} artifact(s) differ from the manifest\n{}",
            report.join("\n")
        )));
    }
    if args.write {
        run_and_record(m.argv.clone(), &cli.command)?;
    }
    Ok(Some(report.join("\n")))
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("QLGRAPH_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("QLGRAPH_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Usage("QLGRAPH_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Replay(a) => replay(a),
        other => run_and_record(std::env::args().skip(1).collect(), other),
    });
    match result {
        Ok(summary) => {
            if let Some(s) = summary {
                println!("{s}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
