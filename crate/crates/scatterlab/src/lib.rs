//! File formats, sweep configuration and the command-line driver built on
//! `scatterlab-core`.

pub mod cli;
pub mod config;
pub mod emit;
pub mod error;
pub mod formats;
pub mod number;

pub use emit::{emit_csv, emit_curves, CurveKind};
pub use error::{CliError, Result};
