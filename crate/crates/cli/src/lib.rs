//! Config files, output formats and the command-line front end for
//! [`fzbeam`].

pub mod app;
pub mod config;
pub mod manifest;
pub mod output;
pub mod sweep;
