//! Configuration, manifests, spacetime diagnostics, verification suites and
//! the `nlsh` command line.

pub mod bench;
pub mod cli;
pub mod config;
pub mod manifest;
pub mod spacetime;
pub mod verify;

pub use cli::run_cli;
pub use config::RunConfig;
