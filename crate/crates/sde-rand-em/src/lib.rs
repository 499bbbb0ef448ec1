//! Command-line front end for the randomised Euler–Maruyama experiments:
//! configuration, a rayon executor, CSV and summary output, SVG plots.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exec;
pub mod output;
pub mod plot;
pub mod run;
pub mod selftest;

pub use config::{Command, RunConfig, Settings};
pub use error::CliError;
pub use exec::RayonExecutor;
pub use run::{execute, run, write_report, Report};
