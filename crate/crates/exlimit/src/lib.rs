//! Scenario runner for the `exlimit-core` limit laws: TOML scenarios, a
//! rayon-backed executor, and the CSV/JSON output formats of the CLI.

pub mod output;
pub mod parallel;
pub mod run;
pub mod scenario;

pub use parallel::Parallel;
pub use run::{run, RunError, RunOptions, RunOutcome};
pub use scenario::{parse_scenario, GridSpec, MeasureSpec, Mode, Scenario, ScenarioError};
