//! Command-line front end: JSON run configs in, CSV/JSON tables out.

mod config;
mod output;
mod run;

pub use config::{validate, Diagnostic, DiagnosticKind, ExperimentKind, RunConfig};
pub use output::{fmt_f64, sha256_hex, write_atomic, Provenance, TOOL_VERSION};
pub use run::{
    default_workers, load_config, run, RunOptions, RunOutcome, CUMULATIVE_COLUMNS, SCALING_COLUMNS,
    SWEEP_COLUMNS, WEIGHTS_COLUMNS,
};
