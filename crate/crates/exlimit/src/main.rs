use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use exlimit::{parse_scenario, run, Mode, RunError, RunOptions};

/// Evaluate and verify Erdős–Kac type limits for exchangeable sequences.
///
/// Runs the scenario in CONFIG. A leading MODE (limit, simulate, verify,
/// sweep) overrides the mode named in the file.
#[derive(Debug, Parser)]
#[command(name = "exlimit", version)]
struct Cli {
    /// [MODE] CONFIG
    #[arg(value_name = "MODE-OR-CONFIG", num_args = 1..=2, required = true)]
    target: Vec<String>,

    /// Exit with status 3 if the verify sup distance exceeds TOL.
    #[arg(long = "assert", value_name = "TOL")]
    assert_tolerance: Option<f64>,

    /// Override the scenario's master seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads; never changes numerical output.
    #[arg(long, env = "EXLIMIT_THREADS")]
    threads: Option<usize>,

    /// Output CSV path (sidecars are placed next to it).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn execute(cli: Cli) -> Result<(), RunError> {
    let (mode, config) = match cli.target.as_slice() {
        [config] => (None, config),
        [mode, config] => (Some(mode.parse::<Mode>().map_err(RunError::Validation)?), config),
        _ => unreachable!("clap enforces one or two positionals"),
    };
    let text = std::fs::read_to_string(config)
        .map_err(|e| RunError::Validation(format!("cannot read {config}: {e}")))?;
    let scenario = parse_scenario(&text).map_err(|e| RunError::Validation(format!("{config}: {e}")))?;
    let options = RunOptions {
        mode,
        seed: cli.seed,
        threads: cli.threads,
        out: cli.out,
        assert_tolerance: cli.assert_tolerance,
    };
    let outcome = run(&scenario, &options)?;
    match outcome.sup_distance {
        Some(d) => println!("{}: sup_distance = {d}", outcome.csv_path.display()),
        None => println!("{}", outcome.csv_path.display()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("exlimit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
