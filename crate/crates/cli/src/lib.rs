//! Library side of the `decomp` command-line pipeline.

pub mod commands;
pub mod config;
pub mod oracle;
pub mod report;

pub use commands::{cmd_decompose, cmd_diagnose, cmd_precision, cmd_run, cmd_sample, PrecisionSource};
pub use config::{GridDims, RunConfig};
pub use report::{Manifest, Report};
