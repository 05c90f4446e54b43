use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand as ClapSubcommand};
use slln_lab::experiment::{load_config, run, Overrides, Subcommand};

#[derive(Parser)]
#[command(name = "slln", version, about = "Strong-law experiments for sparsely contaminated pairwise independent sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Run an experiment config and write report.json, deviations.csv, calculus.csv and plot.svg.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        horizon: Option<u64>,
        /// Worker cap for the simulation; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// hypotheses, calculus, simulate or all.
        #[arg(long, default_value = "all")]
        subcommand: Subcommand,
        #[arg(long)]
        no_plot: bool,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        seed,
        paths,
        horizon,
        threads,
        out,
        subcommand,
        no_plot,
    } = Cli::parse().command;

    let outcome = load_config(&config)
        .and_then(|spec| {
            Overrides {
                seed,
                n_paths: paths,
                horizon,
                out,
            }
            .apply(spec)
        })
        .and_then(|spec| run(&spec, subcommand, threads, !no_plot));

    match outcome {
        Ok((report, written)) => {
            if let Some(c) = &report.convergence {
                println!("verdict: {:?}", c.verdict);
            }
            for f in &report.failures {
                eprintln!("FAIL {f}");
            }
            println!("status: {:?}", report.status);
            println!("report: {}", written.report.display());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let failure = serde_json::json!({ "status": "ERROR", "error": e.to_string() });
            eprintln!("{failure}");
            ExitCode::from(2)
        }
    }
}
