use std::path::PathBuf;
use std::process::ExitCode;

use adcop::model::{random_adcop, random_chain, random_maxdcsp, serialize, DEFAULT_MAX_COST};
use adcop::{BatchSize, IntProblem, Scheduler, SolverConfig, TableLimit, DEFAULT_ORACLE_CAP};
use adcop_cli::{
    medians, medians_path, parse_list, parse_range_f64, parse_range_usize, run_experiment_traced,
    solve_file, write_medians, write_rows, write_traces, CostKind, ExperimentSpec, Family,
    SolveOptions,
};
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "adcop",
    version,
    about = "Solve asymmetric DCOPs and run parameter sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem file and print assignment, cost and metrics
    Solve(SolveArgs),
    /// Run a parameter sweep and write per-run CSV rows plus medians
    Experiment(ExperimentArgs),
    /// Write a random problem in the text format
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// Table dimension limit: an integer >= 2 or w* for the induced width
    #[arg(long, default_value = "w*")]
    kp: TableLimit,
    /// Elimination batch size: an integer >= 1 or all
    #[arg(long, default_value = "all")]
    ke: BatchSize,
    /// Print one line per message
    #[arg(long)]
    trace: bool,
    /// Pseudo tree root (default: highest-degree agent)
    #[arg(long)]
    root: Option<usize>,
    /// Deliver messages in a random order drawn from this seed
    #[arg(long)]
    shuffle: Option<u64>,
    /// Read costs as int, float or rational
    #[arg(long, default_value = "int")]
    costs: CostKind,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: u128,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value = "adcop")]
    family: Family,
    /// Agent counts, as a list (8,12) or range (8:24:4)
    #[arg(long, default_value = "8")]
    agents: String,
    #[arg(long, default_value = "0.25")]
    density: String,
    #[arg(long, default_value = "3")]
    domain: String,
    #[arg(long, default_value = "0.5")]
    tightness: String,
    /// Comma list of table limits, e.g. 2,3,w*
    #[arg(long, default_value = "w*")]
    kp: String,
    /// Comma list of batch sizes, e.g. 1,2,all
    #[arg(long, default_value = "all")]
    ke: String,
    #[arg(long, default_value_t = 1)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_COST)]
    max_cost: u64,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: u128,
    /// Worker threads (0: all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write 0 in the wall_ms column
    #[arg(long)]
    no_wall_time: bool,
    /// Also write every run's message log next to the CSV (.trace.txt)
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "adcop")]
    family: Family,
    #[arg(long)]
    agents: usize,
    #[arg(long, default_value_t = 0.25)]
    density: f64,
    #[arg(long, default_value_t = 3)]
    domain: usize,
    #[arg(long, default_value_t = 0.5)]
    tightness: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_COST)]
    max_cost: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn solve(args: SolveArgs) -> Result<()> {
    let options = SolveOptions {
        config: SolverConfig::new(args.kp, args.ke)?,
        costs: args.costs,
        root: args.root,
        scheduler: args.shuffle.map_or(Scheduler::Fifo, Scheduler::Shuffled),
        trace: args.trace,
        oracle_cap: args.oracle_cap,
    };
    print!("{}", solve_file(&args.file, &options)?);
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let spec = ExperimentSpec {
        family: args.family,
        agents: parse_range_usize(&args.agents).context("--agents")?,
        density: parse_range_f64(&args.density).context("--density")?,
        domain: parse_range_usize(&args.domain).context("--domain")?,
        tightness: parse_range_f64(&args.tightness).context("--tightness")?,
        kp: parse_list(&args.kp).context("--kp")?,
        ke: parse_list(&args.ke).context("--ke")?,
        instances: args.instances,
        seed: args.seed,
        max_cost: args.max_cost,
        oracle_cap: args.oracle_cap,
        jobs: args.jobs,
        wall_time: !args.no_wall_time,
        trace: args.trace,
    };
    let runs = run_experiment_traced(&spec)?;
    if spec.trace {
        let path = args.out.with_extension("trace.txt");
        write_traces(&runs, &path)?;
        eprintln!("wrote message logs to {}", path.display());
    }
    let rows: Vec<_> = runs.into_iter().map(|(r, _)| r).collect();
    write_rows(&rows, &args.out)?;
    let summary = medians_path(&args.out);
    write_medians(&medians(&rows), &summary)?;
    eprintln!(
        "wrote {} rows to {} and medians to {}",
        rows.len(),
        args.out.display(),
        summary.display()
    );
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<()> {
    let p: IntProblem = match args.family {
        Family::Adcop => random_adcop(
            args.agents,
            args.density,
            args.domain,
            args.max_cost,
            args.seed,
        )?,
        Family::Maxdcsp => random_maxdcsp(
            args.agents,
            args.density,
            args.domain,
            args.tightness,
            args.seed,
        )?,
        Family::Chain => random_chain(args.agents, args.domain, args.max_cost, args.seed)?,
    };
    let text = serialize(&p);
    match args.out {
        Some(path) => {
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Experiment(a) => experiment(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
