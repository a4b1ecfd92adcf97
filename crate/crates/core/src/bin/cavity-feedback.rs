use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cavity_feedback::experiments::{
    run_fig2, run_fig3, run_fig4, run_sweep, run_validate, with_threads, Fig2Options, Fig3Options, Fig4Options,
};
use cavity_feedback::Result;

/// Datasets for all-optical feedback between two cavity modes.
#[derive(Parser, Debug)]
#[command(name = "cavity-feedback", version)]
struct Cli {
    /// Directory for output files; created when missing.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Source-mode Fock dimension, overriding the mean-photon rule.
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cat-state Wigner panels with and without feedback.
    Fig2,
    /// Fock-superposition Wigner panels.
    Fig3,
    /// Fidelity curves over efficiency and gamma1/gamma2.
    Fig4,
    /// Curves over the Cartesian product of a TOML parameter file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Oracle-equivalence and arbitration checks.
    Validate,
}

fn run(cli: &Cli) -> Result<bool> {
    let out = &cli.out_dir;
    match &cli.command {
        Command::Fig2 => {
            if cli.truncation.is_some() {
                log::warn!("fig2 uses the closed-form cat Wigner function; --truncation has no effect");
            }
            for p in run_fig2(&Fig2Options::default(), out)? {
                println!("{}", p.path.display());
            }
        }
        Command::Fig3 => {
            let opts = Fig3Options { truncation: cli.truncation, ..Default::default() };
            for p in run_fig3(&opts, out)? {
                println!("{}", p.path.display());
            }
        }
        Command::Fig4 => {
            let opts = Fig4Options { truncation: cli.truncation, ..Default::default() };
            for p in run_fig4(&opts, out)? {
                println!("{}", p.display());
            }
        }
        Command::Sweep { config } => {
            for p in run_sweep(config, out, cli.truncation)? {
                println!("{}", p.display());
            }
        }
        Command::Validate => {
            let report = run_validate()?;
            println!("{report}");
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match with_threads(cli.threads, || run(&cli)).and_then(|r| r) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
