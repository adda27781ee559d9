//! Configuration-driven runner for the spherical-mean inversion library.

pub mod acceptance;
pub mod commands;
pub mod config;
mod error;

pub use error::CliError;
