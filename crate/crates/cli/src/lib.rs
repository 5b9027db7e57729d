//! Configuration, experiment runners and CSV output for `resetctl`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::Path;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use experiments::{run, Kind, Outcome};

/// Runs `kind`, writes `<kind>.csv` and `<kind>.meta.json` into `out_dir`,
/// and reports invariant violations after the files are written.
pub fn execute(cfg: &ExperimentConfig, kind: Kind, out_dir: &Path) -> Result<Outcome, CliError> {
    let outcome = run(cfg, kind)?;
    let meta = experiments::metadata(cfg, &outcome);
    output::write_outputs(out_dir, kind.name(), &outcome.table, &meta)?;
    Ok(outcome)
}
