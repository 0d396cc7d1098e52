//! Command-line front end: structure files in, transferred structures and
//! JSON reports out.

pub mod commands;
pub mod io;

pub use commands::{exit_code, run, Cli, Command, Outcome};
