//! File formats, configuration and the command-line front end for
//! [`efimov_core`].

pub mod cli;
pub mod commands;
pub mod config;
pub mod formats;
pub mod manifest;
