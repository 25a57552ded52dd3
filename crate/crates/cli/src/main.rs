use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use infmax_cli::runner::{dataset_stats, run_experiment, write_outputs};
use infmax_cli::spec::{build_spec, SpecOverrides};
use infmax_cli::verify::{run_checks, DEFAULT_SEED};

/// Adaptive influence maximization experiments.
#[derive(Parser)]
#[command(name = "infmax", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment sweep and write a results CSV.
    Run(Box<RunArgs>),
    /// Run the property verification suite.
    Verify(VerifyArgs),
    /// Print dataset summary (n, m, average degree).
    Stats(StatsArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Spec file with `key = value` lines; flags override its keys.
    spec: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Treat the edge list as directed (default) or undirected.
    #[arg(long)]
    directed: Option<bool>,
    /// Sweep kind: `b` (fix k, vary batch size), `k` (fix r, vary k), `point`.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Restrict to one algorithm: expected | worst_case | naive | fixed | nonadaptive.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    pool_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-batch trace rows to this file.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Master seed of the verification run.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Only run checks whose name contains this substring.
    #[arg(long)]
    filter: Option<String>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    directed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    match cli.command {
        Command::Run(args) => {
            let over = SpecOverrides {
                dataset: args.dataset,
                directed: args.directed,
                sweep_kind: args.sweep,
                k: args.k,
                b: args.b,
                r: args.r,
                eps: args.eps,
                delta: args.delta,
                mode: args.mode,
                realizations: args.realizations,
                pool_size: args.pool_size,
                seed: args.seed,
                out: args.out,
                trace_out: args.trace_out,
            };
            let spec = match build_spec(args.spec.as_deref(), &over) {
                Ok(spec) => spec,
                Err(err) => {
                    eprintln!("error: {err:#}");
                    return ExitCode::from(1);
                }
            };
            match run_experiment(&spec).and_then(|rows| write_outputs(&spec, &rows).map(|()| rows))
            {
                Ok(rows) => {
                    println!("wrote {} rows to {}", rows.len(), spec.out.display());
                    ExitCode::SUCCESS
                }
                Err(err) => {
                    eprintln!("error: {err:#}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Verify(args) => {
            let outcomes = run_checks(args.seed, args.filter.as_deref());
            if outcomes.is_empty() {
                eprintln!("error: no check matches the filter");
                return ExitCode::from(1);
            }
            let mut all_passed = true;
            for outcome in &outcomes {
                println!("{}", outcome.render());
                all_passed &= outcome.passed;
            }
            if all_passed {
                println!("verification passed ({} checks)", outcomes.len());
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Command::Stats(args) => match dataset_stats(&args.dataset, args.directed) {
            Ok((n, m, avg)) => {
                println!("nodes: {n}");
                println!("arcs: {m}");
                println!("avg degree: {avg:.2}");
                ExitCode::SUCCESS
            }
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(1)
            }
        },
    }
}
