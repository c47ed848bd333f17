use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use metasolve_bench::report::{baselines_path, BaselineRow};
use metasolve_bench::{
    compute_baselines, generate_suite, load_suite, read_baselines, read_runs, run_instance, summarize, write_baselines,
    write_runs, write_suite, BenchError, BenchmarkRun, Executor, Pipeline, RunConfig, TspSolver,
};

#[derive(Parser)]
#[command(name = "bench", about = "Benchmark the classical and hybrid VRP pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the ten-instance suite for a seed.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve every instance in a directory repeatedly.
    Run(RunArgs),
    /// Summarize a results file against its baselines.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to the file `bench run` wrote next to the results.
        #[arg(long)]
        baselines: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Directory of `.vrp` files, generated or external.
    #[arg(long, alias = "dir")]
    suite: PathBuf,
    #[arg(long, value_enum)]
    pipeline: Pipeline,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Server base URL; without it problems are solved in-process.
    #[arg(long, conflicts_with = "embedded")]
    api: Option<String>,
    #[arg(long)]
    embedded: bool,
    #[arg(long, value_enum, default_value = "exact")]
    tsp_solver: TspSolver,
    /// Run instances concurrently. Runs of one instance stay sequential.
    #[arg(long)]
    parallel: bool,
    #[arg(long, default_value_t = 600)]
    timeout_secs: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { seed, out } => write_suite(&generate_suite(seed), &out).map(|()| {
            println!("wrote 10 instances to {}", out.display());
            true
        }),
        Command::Run(args) => run(args),
        Command::Report { input, out, baselines } => report(input, out, baselines),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when some run did not produce a valid route set.
fn run(args: RunArgs) -> Result<bool, BenchError> {
    let instances = load_suite(&args.suite)?;
    let exec = match &args.api {
        Some(url) => Executor::api(url)?,
        None => Executor::embedded(),
    };
    let cfg = RunConfig {
        pipeline: args.pipeline,
        tsp: args.tsp_solver,
        runs: args.runs,
        master_seed: args.seed,
        timeout: Duration::from_secs(args.timeout_secs),
    };
    let (exec, cfg) = (&exec, &cfg);
    let per_instance: Vec<Vec<BenchmarkRun>> = if args.parallel {
        // plain threads: the samplers use the rayon pool, and parking its
        // workers in a blocking wait would starve them
        std::thread::scope(|s| {
            let handles: Vec<_> = instances
                .iter()
                .enumerate()
                .map(|(i, inst)| s.spawn(move || run_instance(exec, inst, i, cfg)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect::<Result<_, _>>()
        })?
    } else {
        instances.iter().enumerate().map(|(i, inst)| run_instance(exec, inst, i, cfg)).collect::<Result<_, _>>()?
    };
    let runs: Vec<BenchmarkRun> = per_instance.into_iter().flatten().collect();
    write_runs(&args.out, &runs)?;

    let mut rows = Vec::new();
    for inst in &instances {
        match compute_baselines(inst) {
            Ok(b) => rows.push(BaselineRow::new(inst.name(), b)),
            Err(e) => eprintln!("bench: no baselines for {e}"),
        }
    }
    write_baselines(&baselines_path(&args.out), &rows)?;

    let failed = runs.iter().filter(|r| !r.valid).count();
    println!("{} runs, {failed} without a valid route set, written to {}", runs.len(), args.out.display());
    Ok(failed == 0)
}

/// `Ok(false)` when the dominance checks fail.
fn report(input: PathBuf, out: PathBuf, baselines: Option<PathBuf>) -> Result<bool, BenchError> {
    let runs = read_runs(&input)?;
    let path = baselines.unwrap_or_else(|| baselines_path(&input));
    let baselines = if path.exists() { read_baselines(&path)? } else { Vec::new() };
    let summary = summarize(&runs, &baselines);
    let text = summary.render();
    std::fs::write(&out, &text)?;
    print!("{text}");
    Ok(summary.violations.is_empty())
}
