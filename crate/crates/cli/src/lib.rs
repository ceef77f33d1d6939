//! Config parsing, output formats and subcommands of the `metriplectic` binary.

pub mod commands;
pub mod config;
pub mod output;
