use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use calib_cli::{
    config::{parse_method, parse_nature, resolve_out_dir, ForecasterKind, RunConfig},
    error::CliError,
    plot::emit_plot,
    runner::execute,
};

/// Simulator for grid-calibrated forecasting games.
#[derive(Parser)]
#[command(name = "calib", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play forecaster-vs-Nature games and write transcript/score CSVs.
    Run(RunArgs),
    /// Render a log-log convergence chart from a score CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Number of outcomes A (>= 2).
    #[arg(long, default_value_t = 2)]
    outcomes: usize,

    /// Grid radius for the eps and deterministic forecasters.
    #[arg(long)]
    epsilon: Option<f64>,

    /// Number of rounds to play.
    #[arg(long, default_value_t = 10_000)]
    rounds: u64,

    /// Forecaster: eps, meta or deterministic.
    #[arg(long, default_value = "eps")]
    forecaster: String,

    /// Minimax method: exact or mw:<delta>.
    #[arg(long, default_value = "exact")]
    method: String,

    /// Nature: iid:<p1,...,pA>, markov:<file>, seq:<file>, contrarian, greedy.
    #[arg(long)]
    nature: String,

    /// Seed for a single run.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Comma-separated seed list; overrides --seed and runs in parallel.
    #[arg(long)]
    seeds: Option<String>,

    /// Checkpoint every N rounds instead of at powers of two.
    #[arg(long)]
    checkpoint_every: Option<u64>,

    /// Output directory (default: $CALIB_OUT_DIR, then the cwd).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Score CSV produced by `calib run`.
    #[arg(long)]
    scores: PathBuf,

    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

fn parse_seeds(args: &RunArgs) -> Result<Vec<u64>, CliError> {
    match &args.seeds {
        None => Ok(vec![args.seed]),
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::Config(format!("cannot parse seed '{s}'")))
            })
            .collect(),
    }
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let config = RunConfig {
        outcomes: args.outcomes,
        epsilon: args.epsilon,
        rounds: args.rounds,
        forecaster: ForecasterKind::parse(&args.forecaster)?,
        method: parse_method(&args.method)?,
        nature: parse_nature(&args.nature, args.outcomes)?,
        seeds: parse_seeds(&args)?,
        checkpoint_every: args.checkpoint_every,
        out_dir: resolve_out_dir(args.out_dir.clone()),
    };
    let artifacts = execute(&config)?;
    for a in &artifacts {
        let s = &a.final_scores;
        println!(
            "seed {}: T={} l1={:.6} brier={:.6} l2_dist_C={:.6} bound_U={:.6}",
            a.seed, s.rounds, s.l1, s.brier, s.l2_distance, s.bound
        );
        println!(
            "seed {}: wrote {} and {}",
            a.seed,
            a.transcript_path.display(),
            a.scores_path.display()
        );
    }
    if artifacts.len() > 1 {
        let mean =
            artifacts.iter().map(|a| a.final_scores.l1).sum::<f64>() / artifacts.len() as f64;
        println!("mean final l1 over {} seeds: {mean:.6}", artifacts.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Plot(args) => emit_plot(&args.scores, &args.out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
