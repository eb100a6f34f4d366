//! Configuration-driven front end: single points, parameter sweeps,
//! relaxation times and the reaction-coordinate utility, all as CSV.

pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;

pub use commands::{run, Command, RunOptions};
pub use config::ModelConfig;
pub use error::CliError;
pub use output::Table;
