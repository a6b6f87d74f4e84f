//! Execution of a scenario in one of the four modes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use exlimit_core::engine::simulate_max_batch;
use exlimit_core::limit_laws::general_limit;
use exlimit_core::verify::{compare_ecdf, convergence_sweep};
use exlimit_core::SimulationConfig;

use crate::output::{self, RunSummary};
use crate::parallel::Parallel;
use crate::scenario::{Mode, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("sup distance {sup_distance} exceeds the asserted tolerance {tolerance}")]
    AssertionFailed { sup_distance: f64, tolerance: f64 },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 1,
            RunError::Runtime(_) => 2,
            RunError::AssertionFailed { .. } => 3,
        }
    }
}

impl From<crate::scenario::ScenarioError> for RunError {
    fn from(e: crate::scenario::ScenarioError) -> Self {
        RunError::Validation(e.to_string())
    }
}

fn engine_error(e: exlimit_core::Error) -> RunError {
    match e {
        exlimit_core::Error::ResourceExhausted { .. } => RunError::Runtime(e.to_string()),
        other => RunError::Validation(other.to_string()),
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub assert_tolerance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub sup_distance: Option<f64>,
}

fn write(path: &Path, contents: &str) -> Result<(), RunError> {
    std::fs::write(path, contents)
        .map_err(|e| RunError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Runs a scenario and writes its CSV output plus the JSON summary sidecar.
///
/// With an assert tolerance (verify mode only) the files are still written
/// before a breach is reported.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<RunOutcome, RunError> {
    let mut scenario = scenario.clone();
    if let Some(mode) = options.mode {
        scenario.mode = mode;
    }
    if let Some(seed) = options.seed {
        scenario.seed = seed;
    }
    if let Some(out) = &options.out {
        scenario.output = Some(out.clone());
    }
    scenario.validate()?;
    if let Some(tol) = options.assert_tolerance {
        if scenario.mode != Mode::Verify {
            return Err(RunError::Validation("--assert applies only to verify mode".into()));
        }
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(RunError::Validation(format!("assert tolerance {tol} must be >= 0")));
        }
    }
    let executor = match options.threads {
        Some(0) => return Err(RunError::Validation("thread count must be >= 1".into())),
        Some(k) => Parallel::with_threads(k).map_err(|e| RunError::Runtime(e.to_string()))?,
        None => Parallel::global(),
    };

    let started = Instant::now();
    let measure = scenario.measure.build().map_err(engine_error)?;
    let model_summary = measure.summarize();
    let x_grid = scenario.x_grid();
    let csv_path = scenario.output_path();
    let summary_path = output::sidecar_path(&csv_path, "summary.json");

    let mut summary = RunSummary {
        name: scenario.name.clone(),
        mode: scenario.mode.as_str().into(),
        seed: scenario.seed,
        n: scenario.n,
        replications: scenario.replications,
        model_summary: model_summary.clone(),
        sup_distance: None,
        excluded_points: Vec::new(),
        sweep: Vec::new(),
        assert_tolerance: options.assert_tolerance,
        runtime_seconds: 0.0,
    };

    let csv = match scenario.mode {
        Mode::Limit => {
            summary.replications = 0;
            let theoretical = x_grid
                .iter()
                .map(|&x| general_limit(x, &model_summary))
                .collect::<Result<Vec<_>, _>>()
                .map_err(engine_error)?;
            output::limit_csv(&x_grid, &theoretical)
        }
        Mode::Simulate | Mode::Verify => {
            let n = scenario.n.expect("validated");
            let config = SimulationConfig::new(n, scenario.replications, scenario.seed, x_grid.clone())
                .map_err(engine_error)?;
            let ecdf = simulate_max_batch(&measure, &config, &executor).map_err(engine_error)?;
            if scenario.mode == Mode::Simulate {
                let empirical = x_grid
                    .iter()
                    .map(|&x| ecdf.evaluate(x))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(engine_error)?;
                write(&output::sidecar_path(&csv_path, "quantiles.csv"), &output::quantile_csv(&ecdf))?;
                output::simulate_csv(&x_grid, &empirical)
            } else {
                let report = compare_ecdf(&ecdf, &model_summary, &x_grid, scenario.atom_window)
                    .map_err(engine_error)?;
                summary.sup_distance = Some(report.sup_distance);
                summary.excluded_points = report.excluded_points.clone();
                output::verify_csv(&report)
            }
        }
        Mode::Sweep => {
            summary.n = None;
            let ns = scenario.sweep_ns.as_deref().expect("validated");
            let points = convergence_sweep(
                &measure,
                ns,
                scenario.replications,
                scenario.seed,
                &x_grid,
                scenario.atom_window,
                &executor,
            )
            .map_err(engine_error)?;
            summary.sweep = points.clone();
            output::sweep_csv(&points)
        }
    };

    write(&csv_path, &csv)?;
    summary.runtime_seconds = started.elapsed().as_secs_f64();
    let json = serde_json::to_string_pretty(&summary).map_err(|e| RunError::Runtime(e.to_string()))?;
    write(&summary_path, &(json + "\n"))?;

    if let (Some(tolerance), Some(sup_distance)) = (options.assert_tolerance, summary.sup_distance) {
        if sup_distance > tolerance {
            return Err(RunError::AssertionFailed {
                sup_distance,
                tolerance,
            });
        }
    }
    Ok(RunOutcome {
        csv_path,
        summary_path,
        sup_distance: summary.sup_distance,
    })
}
