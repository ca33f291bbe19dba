//! Command-line front end: configuration ingestion, the potential expression
//! parser, pipeline orchestration, report emission, and the built-in
//! verification suite.

pub mod config;
pub mod pipeline;
pub mod potential;
pub mod report;
pub mod verify;

pub use config::{PotentialSpec, ProblemConfig};
pub use pipeline::{run_solve, SolveOutput};
pub use potential::parse_potential;
pub use verify::{verify_suite, VerifyReport};
