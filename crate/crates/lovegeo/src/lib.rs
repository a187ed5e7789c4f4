//! File formats, run configuration and subcommands of the `lovegeo` tool.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod io;
pub mod report;

pub use config::{ConfigLayer, OutputFormat, RunConfig};
pub use error::CliError;
pub use report::{RunReport, Verdict};
