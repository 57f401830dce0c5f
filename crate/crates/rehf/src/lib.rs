//! Driver layer for `rehf-core`: run configuration, file formats, parallel
//! ensembles, the property suite and the `rehf` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod run;
pub mod verify;

pub use config::RunConfig;
pub use error::{AppError, AppResult};
