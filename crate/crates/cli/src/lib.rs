//! Command-line front end for link-predicted influence maximization.

pub mod cli;
pub mod commands;
pub mod config;
pub mod exit;

pub use cli::run;
