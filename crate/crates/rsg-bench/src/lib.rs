//! Experiment driver for `rsg-core`: parameter tuning sweeps, neighbor-search
//! comparisons, roadmap construction and planner convergence runs, each
//! written as one CSV file of [`ResultRow`]s.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod row;

pub use error::{BenchError, BenchResult};
pub use row::{read_rows, write_rows, ResultRow};
