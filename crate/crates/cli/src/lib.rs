//! Command-line front end for `hiswipt`: scenario files, sweeps, figure
//! tables and validation runs.

pub mod cli;
pub mod commands;
pub mod config;
pub mod figures;
pub mod table;

pub use cli::{Cli, Command, CommonArgs};
