//! `voxlabel` command-line interface.

mod commands;
mod error;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;
use settings::Settings;

#[derive(Debug, Parser)]
#[command(
    name = "voxlabel",
    version,
    about = "Swept-volume labeling, LTL safety monitors, and monitored planning"
)]
struct Cli {
    /// JSON file of flag values (keys are flag names with `_` for `-`);
    /// flags given on the command line win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Cap on worker threads [default: all cores]
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Increase log verbosity (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a trace of proposition sets against an LTL safety formula
    Monitor(MonitorArgs),
    /// Build a transition system and write it to a file
    Build(BuildArgs),
    /// Label a transition system's edges with proposition volumes
    Label(LabelArgs),
    /// Find a minimum-cost path that respects an LTL safety formula
    Plan(PlanArgs),
    /// Time labeling over several system sizes and write a CSV report
    Bench(BenchArgs),
    /// Monte-Carlo estimate of voxels scanned before early termination
    Bernoulli(BernoulliArgs),
}

#[derive(Debug, Args)]
struct MonitorArgs {
    /// LTL formula, e.g. "G (split_lane -> X !split_lane)"
    #[arg(long)]
    formula: Option<String>,
    /// Trace file: one step per line, comma-separated proposition names,
    /// empty line for the empty set
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// Random seed (required here or in the config file)
    #[arg(long)]
    seed: Option<u64>,
    /// Output transition system file
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Roadmap layout: `loop` (lane-following around the benchmark loop)
    /// or `square` (uniform over a 100 m square) [default: loop]
    #[arg(long)]
    preset: Option<String>,
    /// Number of transitions to generate [default: 10000]
    #[arg(long)]
    edges: Option<usize>,
    /// Maximum number of expanded vertices [default: same as --edges]
    #[arg(long)]
    vertices: Option<usize>,
    /// Motions kept per expanded vertex [default: 4]
    #[arg(long)]
    neighbors: Option<usize>,
    /// Also store every edge's sampled trajectory [default: false]
    #[arg(long)]
    samples: bool,
}

#[derive(Debug, Args)]
struct LabelArgs {
    /// Transition system file written by `build`
    #[arg(long)]
    system: Option<PathBuf>,
    /// Output label matrix: `.csv` for CSV, anything else for packed binary
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Grid depth d (2^d cells) [default: 21]
    #[arg(long)]
    depth: Option<u32>,
    /// JSON file of proposition boxes; without it the loop scenario's
    /// moving_vehicle and not_nominal_lane volumes are used
    #[arg(long)]
    props_file: Option<PathBuf>,
    /// Scenario seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Scenario query index [default: 0]
    #[arg(long)]
    query: Option<u64>,
    /// Also write the swept-volume matrix in CSR form
    #[arg(long)]
    csr: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlanArgs {
    /// Safety formula [default: "G (split_lane -> X !split_lane)"]
    #[arg(long)]
    formula: Option<String>,
    /// Use the built-in six-state lane-change example
    #[arg(long)]
    demo: bool,
    /// Labeled graph JSON: {"propositions": [...], "vertices": n,
    /// "edges": [{"from", "to", "cost", "labels": [...]}]}
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Transition system file (with --labels)
    #[arg(long)]
    system: Option<PathBuf>,
    /// Label matrix file for --system
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Proposition names of the label columns, comma-separated
    /// [default: moving_vehicle,not_nominal_lane]
    #[arg(long)]
    props: Option<String>,
    /// Start vertex [default: 0]
    #[arg(long)]
    start: Option<usize>,
    /// Goal vertices, comma-separated [default with --demo: 5]
    #[arg(long)]
    goal: Option<String>,
    /// Write the product graph in Graphviz format
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Random seed (required here or in the config file)
    #[arg(long)]
    seed: Option<u64>,
    /// CSV report path
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Transition counts, comma-separated; smaller sizes are random subsets
    /// of the largest roadmap [default: 20000,40000,80000,160000]
    #[arg(long)]
    sizes: Option<String>,
    /// Grid depth d [default: 21]
    #[arg(long)]
    depth: Option<u32>,
    /// Labeling queries per size and proposition [default: 150]
    #[arg(long)]
    queries: Option<usize>,
}

#[derive(Debug, Args)]
struct BernoulliArgs {
    /// Probability that a voxel lies in the transition's swept volume
    p_mot: f64,
    /// Probability that a voxel lies in the proposition's volume
    p_pred: f64,
    /// Number of simulated scans [default: 100000]
    #[arg(long)]
    trials: Option<usize>,
    /// Voxels per row [default: 2097152]
    #[arg(long)]
    length: Option<u64>,
    /// Random seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let settings = Settings::load(cli.config.as_deref())?;
    let workers = settings.pick(cli.workers, "workers")?;
    if let Some(n) = workers {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match cli.command {
        Command::Monitor(a) => commands::monitor(&settings, a),
        Command::Build(a) => commands::build(&settings, a),
        Command::Label(a) => commands::label(&settings, a, workers),
        Command::Plan(a) => commands::plan(&settings, a),
        Command::Bench(a) => commands::bench(&settings, a, workers),
        Command::Bernoulli(a) => commands::bernoulli(&settings, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
