//! Command-line pipelines, JSON input specs, CSV/JSON report writers and
//! the acceptance suite built on `ultraflat-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod commands;
pub mod error;
pub mod inputs;
pub mod io;
pub mod parallel;
pub mod pipelines;

pub use cli::run;
pub use error::{CliError, CliResult};
