use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use normbrauer::config::{load_invariants, load_job_config, load_ramified};
use normbrauer::oracle::DEFAULT_ORACLE_BUDGET;
use normbrauer::report::{emit_machine, emit_text, run, RunOptions};

/// Compute the unramified Brauer quotient of a multinorm-equation variety
/// from finite Galois data.
#[derive(Parser)]
#[command(name = "normbrauer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Run the computation described by a TOML configuration file.
    Compute {
        /// Path to the job configuration.
        config: String,
        /// Cross-check the combinatorial result against the group-cohomology
        /// computation; any disagreement is a hard failure (exit code 3).
        #[arg(long)]
        oracle: bool,
        /// Largest group order the cohomology cross-check will accept.
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        oracle_budget: usize,
        /// TOML file listing ramified places (label + decomposition-group
        /// generator words); enables the global layer.
        #[arg(long)]
        ramified: Option<String>,
        /// TOML file of exact local invariants (place, index, num, den);
        /// enables the pairing verdicts. Requires --ramified.
        #[arg(long)]
        invariants: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<String>,
    },
}

fn real_main() -> Result<(), (i32, String)> {
    let cli = Cli::parse();
    let Command::Compute { config, oracle, oracle_budget, ramified, invariants, format, out } =
        cli.command;

    let job = load_job_config(&config).map_err(|e| (2, e.to_string()))?;
    let ramified = match ramified {
        Some(path) => Some(load_ramified(&path, &job.group).map_err(|e| (2, e.to_string()))?),
        None => None,
    };
    let invariants = match invariants {
        Some(path) => {
            if ramified.is_none() {
                return Err((2, "--invariants requires --ramified".to_string()));
            }
            Some(load_invariants(&path).map_err(|e| (2, e.to_string()))?)
        }
        None => None,
    };

    let opts = RunOptions { oracle, oracle_budget, ramified, invariants };
    let report = run(&job, &opts).map_err(|e| (e.exit_code(), e.to_string()))?;

    let rendered = match format {
        Format::Text => emit_text(&report),
        Format::Machine => emit_machine(&report),
    };
    match out {
        Some(path) => std::fs::write(&path, rendered)
            .map_err(|e| (2, format!("cannot write {path}: {e}")))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
