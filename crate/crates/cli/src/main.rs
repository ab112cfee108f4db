mod absence;
mod error;
mod graph;
mod options;
mod run;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};
use crate::options::{ClassifyOptions, RunOptions};
use crate::run::RunManifest;

/// Generalized Glauber dynamics of the ±J Ising model on periodic graphs.
///
/// Exit codes: 0 success, 1 a requested check failed, 2 bad arguments,
/// 3 invalid graph/window/assignment, 4 flip-set catalog over the cap,
/// 5 I/O error, 6 event logs too sparse for the requested analysis,
/// 7 absence region over the cap, 8 some sweep cells failed.
#[derive(Debug, Parser)]
#[command(name = "glauberk", version)]
struct Cli {
    /// Worker threads for replicas and sweep cells
    #[arg(long, global = true, env = "GLAUBERK_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build, inspect, export or certify periodic graphs
    #[command(subcommand)]
    Graph(graph::GraphCommand),
    /// Run the dynamics
    Simulate(SimulateArgs),
    /// Run the dynamics and classify the fixation type
    Classify(ClassifyArgs),
    /// Certify k-absence on a finite region
    Absence(absence::AbsenceArgs),
    /// Run a parameter grid
    Sweep(sweep::SweepArgs),
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    /// TOML file with run options; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Re-execute a run manifest (file or output directory)
    #[arg(long, conflicts_with = "config")]
    from: Option<PathBuf>,
    #[command(flatten)]
    run: RunOptions,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct ClassifyArgs {
    #[command(flatten)]
    sim: SimulateArgs,
    #[command(flatten)]
    classify: ClassifyOptions,
}

fn resolve_sim(a: &SimulateArgs) -> CliResult<(options::Resolved, Option<RunManifest>)> {
    if let Some(from) = &a.from {
        if a.run != RunOptions::default() {
            return Err(CliError::usage("run options cannot be combined with --from"));
        }
        let m = RunManifest::load(from)?;
        return Ok((m.resolved(), Some(m)));
    }
    let mut opts = a.run.clone();
    if let Some(path) = &a.config {
        opts.merge(RunOptions::from_toml(path)?);
    }
    Ok((opts.resolve()?, None))
}

fn simulate(a: SimulateArgs, classify: Option<ClassifyOptions>) -> CliResult<()> {
    let (resolved, manifest) = resolve_sim(&a)?;
    let classify = classify.map(|mut c| {
        if let Some(prev) = manifest.as_ref().and_then(|m| m.classify.clone()) {
            c.merge(prev);
        }
        c
    });
    let command = if classify.is_some() { "classify" } else { "simulate" };
    let exec = run::execute(resolved, classify)?;
    print!("{}", run::describe(&exec));
    if let Some(dir) = &a.out {
        let m = run::write_out(dir, &exec, command)?;
        println!("wrote {} files to {}", m.artifacts.len(), dir.display());
        if let Some(prev) = manifest {
            let same = prev
                .digests
                .iter()
                .filter(|(name, _)| name.as_str() != "report.json" || prev.command == command)
                .all(|(name, d)| m.digests.get(name) == Some(d));
            if !same {
                return Err(CliError {
                    code: error::code::CHECK_FAILED,
                    msg: "replay differs from the manifest".into(),
                });
            }
            println!("replay matches the manifest");
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Graph(c) => graph::run(c),
        Command::Simulate(a) => simulate(a, None),
        Command::Classify(a) => simulate(a.sim, Some(a.classify)),
        Command::Absence(a) => absence::run(a),
        Command::Sweep(a) => sweep::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
