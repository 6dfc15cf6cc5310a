//! Command-line front end of the plasma penalization solver: flag parsing,
//! CSV tables and parallel sweeps over `η` or the mesh size.

pub mod args;
pub mod commands;
pub mod error;
pub mod sweep;
pub mod table;

pub use args::Cli;
pub use commands::execute;
pub use error::{AppError, EXIT_BLOWUP, EXIT_CONFIG, EXIT_IO};
