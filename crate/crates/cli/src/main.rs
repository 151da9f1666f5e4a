use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use extrafw_core::harness::{self, read_trace, ExperimentConfig};
use extrafw_core::Error;

#[derive(Parser)]
#[command(name = "extrafw", version, about = "Run and inspect Frank-Wolfe experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every solver of a config and write traces plus summary.json.
    Run {
        config: PathBuf,
        /// Run solvers one after another instead of on separate threads.
        #[arg(long)]
        sequential: bool,
        /// Output directory (defaults to the config's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Log-log slope of a trace's optimality column over k in [from, to].
    Slopes {
        trace: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) | Error::InvalidArgument(_) | Error::UnsupportedConstraint(_) => {
            ExitCode::from(2)
        }
        e if e.is_data_error() => ExitCode::from(3),
        _ => ExitCode::FAILURE,
    }
}

fn slopes(trace: &PathBuf, from: usize, to: usize) -> Result<(), Error> {
    if from == 0 || from >= to {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= from < to, got from = {from}, to = {to}"
        )));
    }
    let rows = read_trace(trace)?;
    let (ks, gaps): (Vec<usize>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.k >= from && r.k <= to)
        .map(|r| (r.k, r.optimality))
        .unzip();
    match harness::slope_fit(&ks, &gaps) {
        Ok(s) => println!("{s:.6}"),
        Err(Error::NonPositiveGap { k, value }) => {
            let (s, _) = harness::slope_fit_clipped(&ks, &gaps)?;
            eprintln!("warning: optimality {value} at k = {k}; gaps clipped for the fit");
            println!("{s:.6}");
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            config,
            sequential,
            out,
        } => harness::run_config_file(config, out.as_deref(), *sequential).map(|(dir, out)| {
            for (name, s) in &out.summary.solvers {
                println!(
                    "{name:>8}  k = {:>6}  f = {:.10e}  optimality = {:.3e}",
                    s.iterations, s.final_objective, s.final_optimality
                );
            }
            for w in &out.summary.warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {}", dir.display());
        }),
        Command::Validate { config } => ExperimentConfig::load(config).map(|c| {
            println!(
                "ok: {:?} task, {} solver(s), {} iterations",
                c.task,
                c.solvers.len(),
                c.iterations
            );
        }),
        Command::Slopes { trace, from, to } => slopes(trace, *from, *to),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
