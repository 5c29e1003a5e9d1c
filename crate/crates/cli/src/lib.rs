//! Command-line front end: forward synthesis, reconstruction, comparison
//! and scenario listing.

pub mod args;
pub mod commands;
pub mod container;
pub mod error;
pub mod output;

pub use args::Cli;
pub use commands::{run, RunManifest};
pub use error::{CliError, Result};
