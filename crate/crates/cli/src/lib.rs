//! Configuration, command dispatch and CSV output for the `kickflow` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod setup;

pub use commands::{run, Table};
pub use config::{Command, RunConfig};
pub use error::{CliError, ConfigError, Result};
pub use setup::Setup;
