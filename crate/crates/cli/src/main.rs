mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use dirgroup::exec::with_workers;
use dirgroup::harness::{self, EvaluateOptions, RunManifest, Status};
use dirgroup::lp::{export_lp, Formulation};
use dirgroup::{ChannelInstance, Error, Exec, Method};

use config::FileConfig;

const DEFAULT_NODES: [usize; 1] = [15];
const DEFAULT_INSTANCES: usize = 20;
const DEFAULT_TIMEOUT_S: f64 = 600.0;
const DEFAULT_METHODS: [Method; 4] = [Method::Exact, Method::Approximation, Method::Clumped, Method::Power];

/// Directional node grouping experiments: generate channel instances, run the
/// partitioners, summarize SINR statistics and export the MILP model.
#[derive(Debug, Parser)]
#[command(name = "dirgroup", version)]
struct Cli {
    /// TOML run configuration; flags take precedence over it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write random channel instances and a manifest.
    Generate(GenerateArgs),
    /// Run partitioners on every instance of a directory and record SINR results.
    Evaluate(EvaluateArgs),
    /// Mean and 95% confidence interval per node count, method and metric.
    Summarize(SummarizeArgs),
    /// Write the mixed-integer model of one instance in CPLEX LP format.
    ExportLp(ExportLpArgs),
}

#[derive(Debug, Args)]
struct Shared {
    /// Number of groups G.
    #[arg(long)]
    groups: Option<usize>,
    /// Pilots per group P (group capacity).
    #[arg(long)]
    pilots: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Node counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    nodes: Option<Vec<usize>>,
    /// Instances per node count.
    #[arg(long)]
    instances: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    shared: Shared,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Directory of instance files.
    input: PathBuf,
    /// Methods to run, comma separated.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Seconds allowed per exact solve; 0 disables the limit.
    #[arg(long)]
    timeout: Option<f64>,
    #[command(flatten)]
    shared: Shared,
    /// Output directory for results.csv and evaluation.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SummarizeArgs {
    /// Results file written by `evaluate`.
    input: PathBuf,
    /// Output directory for summary.csv and long.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExportLpArgs {
    /// Instance file.
    input: PathBuf,
    #[command(flatten)]
    shared: Shared,
    /// Emit the constraints exactly as printed, without the empty-position repairs.
    #[arg(long)]
    verbatim: bool,
    /// Destination .lp file.
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Capacity { .. } | Error::TooLarge { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

enum Outcome {
    Done,
    Partial(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Partial(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Generate(args) => generate(file, args),
        Command::Evaluate(args) => evaluate(file, args),
        Command::Summarize(args) => summarize(&args),
        Command::ExportLp(args) => export(file, args),
    }
}

fn groups_and_pilots(file: &FileConfig, shared: &Shared) -> (usize, usize) {
    (
        shared.groups.unwrap_or(file.experiment.num_groups),
        shared.pilots.unwrap_or(file.experiment.num_pilots),
    )
}

fn generate(file: FileConfig, args: GenerateArgs) -> Result<Outcome, Failure> {
    let mut config = file.experiment.clone();
    (config.num_groups, config.num_pilots) = groups_and_pilots(&file, &args.shared);
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let nodes = args.nodes.or(file.run.nodes).unwrap_or(DEFAULT_NODES.to_vec());
    let count = args.instances.or(file.run.instances).unwrap_or(DEFAULT_INSTANCES);
    let workers = args.shared.workers.or(file.run.workers);
    let manifest = with_workers(workers, || harness::generate(&config, &nodes, count, &args.out, Exec::default()))?;
    eprintln!("wrote {} instances to {}", manifest.instances.len(), args.out.display());
    Ok(Outcome::Done)
}

fn evaluate(file: FileConfig, args: EvaluateArgs) -> Result<Outcome, Failure> {
    let (groups, pilots) = groups_and_pilots(&file, &args.shared);
    let methods = args.methods.or(file.run.methods).unwrap_or(DEFAULT_METHODS.to_vec());
    if methods.is_empty() {
        return Err(Failure::Usage("no methods given".into()));
    }
    let timeout_s = args.timeout.or(file.run.timeout).unwrap_or(DEFAULT_TIMEOUT_S);
    if !(timeout_s.is_finite() && timeout_s >= 0.0) {
        return Err(Failure::Usage(format!("invalid timeout {timeout_s}")));
    }
    if !args.input.is_dir() {
        return Err(Failure::Usage(format!("{} is not a directory", args.input.display())));
    }
    let options = EvaluateOptions {
        methods,
        groups,
        pilots,
        timeout: (timeout_s > 0.0).then(|| Duration::from_secs_f64(timeout_s)),
        exec: Exec::default(),
    };
    let workers = args.shared.workers.or(file.run.workers);
    let rows = with_workers(workers, || harness::evaluate(&args.input, &options))?;

    std::fs::create_dir_all(&args.out).map_err(Error::from)?;
    let results_path = args.out.join("results.csv");
    harness::write_results(&results_path, &rows)?;
    write_evaluation_manifest(&args.input, &args.out, &results_path, &rows)?;

    let failed = rows.iter().filter(|r| r.status != Status::Ok).count();
    eprintln!("wrote {} rows to {}", rows.len(), results_path.display());
    if failed > 0 {
        let timeouts = rows.iter().filter(|r| r.status == Status::Timeout).count();
        return Ok(Outcome::Partial(format!(
            "{failed} of {} runs did not complete ({timeouts} timed out)",
            rows.len()
        )));
    }
    Ok(Outcome::Done)
}

fn write_evaluation_manifest(
    input: &Path,
    out: &Path,
    results: &Path,
    rows: &[harness::ResultRow],
) -> Result<(), Failure> {
    let source = input.join(harness::MANIFEST_FILE);
    let mut manifest = if source.exists() {
        RunManifest::read(&source)?
    } else {
        RunManifest {
            tool_version: dirgroup::VERSION.to_string(),
            config: Default::default(),
            master_seed: 0,
            instances: Vec::new(),
            method_seconds: Default::default(),
            outputs: Vec::new(),
        }
    };
    manifest.tool_version = dirgroup::VERSION.to_string();
    manifest.method_seconds = harness::method_seconds(rows);
    manifest.outputs = vec![results.display().to_string()];
    manifest.write(&out.join(harness::EVALUATION_FILE))?;
    Ok(())
}

fn summarize(args: &SummarizeArgs) -> Result<Outcome, Failure> {
    let rows = harness::read_results(&args.input)?;
    let (summary, long) = harness::summarize(&rows);
    std::fs::create_dir_all(&args.out).map_err(Error::from)?;
    harness::write_summary(&args.out.join("summary.csv"), &summary)?;
    harness::write_long(&args.out.join("long.csv"), &long)?;
    eprintln!("wrote {} summary rows to {}", summary.len(), args.out.display());
    Ok(Outcome::Done)
}

fn export(file: FileConfig, args: ExportLpArgs) -> Result<Outcome, Failure> {
    let (groups, pilots) = groups_and_pilots(&file, &args.shared);
    let instance = ChannelInstance::read(&args.input)?;
    let formulation = if args.verbatim {
        Formulation::Verbatim
    } else {
        Formulation::Repaired
    };
    let model = export_lp(&instance.profiles, groups, pilots, &args.out, formulation)?;
    eprintln!(
        "wrote {} variables and {} constraints to {}",
        model.variables.len(),
        model.rows.len(),
        args.out.display()
    );
    Ok(Outcome::Done)
}
