use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tdho::harness::{
    exit_code_for, parse_config, run_experiment, run_sweep, Experiment, RunConfig, EXIT_FAIL, EXIT_PASS, EXIT_USAGE,
    OUTPUT_ROOT_ENV,
};

#[derive(Parser)]
#[command(name = "tdho", version, about = "Final-state problem for NLS with a time-decaying harmonic oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the classical flow and extract its asymptotics
    Classical(Args),
    /// Print the parameter report
    Params(Args),
    /// Evolve u_p(T) in the lab frame
    Evolve(Args),
    /// Measure the decay rate of ||u - u_p|| against the admissible window
    Verify(Args),
    /// Picard iteration on the truncated final-state problem
    Picard(Args),
    /// Run verify for every lambda listed in the [sweep] section
    Sweep(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Rerun completed runs
    #[arg(long)]
    force: bool,
}

fn output_dir(args: &Args, cfg: &RunConfig, name: &str) -> PathBuf {
    if let Some(o) = &args.out {
        return o.clone();
    }
    if let Some(o) = &cfg.output_dir {
        return o.clone();
    }
    let root = std::env::var_os(OUTPUT_ROOT_ENV).map_or_else(|| PathBuf::from("tdho-out"), PathBuf::from);
    root.join(name)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_PASS as u8 });
        }
    };
    let (args, experiment) = match &cli.command {
        Command::Classical(a) => (a, Some(Experiment::Classical)),
        Command::Params(a) => (a, Some(Experiment::Params)),
        Command::Evolve(a) => (a, Some(Experiment::Evolve)),
        Command::Verify(a) => (a, Some(Experiment::VerifyTheorem)),
        Command::Picard(a) => (a, Some(Experiment::Picard)),
        Command::Sweep(a) => (a, None),
    };
    if args.workers == 0 {
        eprintln!("error: --workers must be at least 1");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(exit_code_for(&e) as u8);
        }
    };
    let code = match experiment {
        Some(x) => {
            cfg.experiment = x;
            let dir = output_dir(args, &cfg, x.name());
            match run_experiment(&cfg, &dir, args.force) {
                Ok(o) => {
                    print!("{}", o.to_text());
                    if o.skipped {
                        eprintln!("note: {} already complete; use --force to rerun", dir.display());
                    }
                    if o.pass {
                        EXIT_PASS
                    } else {
                        EXIT_FAIL
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code_for(&e)
                }
            }
        }
        None => {
            let dir = output_dir(args, &cfg, "sweep");
            match run_sweep(&cfg, &dir, args.workers, args.force) {
                Ok(csv) => {
                    print!("{csv}");
                    EXIT_PASS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code_for(&e)
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
