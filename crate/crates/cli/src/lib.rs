//! Command-line front end for `dirq-core`: verification report, fidelity
//! evaluation, measurement search, spin-flip simulation and partial-transpose
//! analysis, with JSON file formats and parallel Monte-Carlo drivers.

pub mod app;
pub mod error;
pub mod files;
pub mod oracle;
pub mod parallel;
pub mod verify;

pub use app::main_with_args;
pub use error::CliError;
