//! Std companion to the `screenlasso` solver crate: dataset loading
//! (dense CSV and svmlight-style sparse files), a seeded synthetic problem
//! generator, regularization-path benchmarking with timing and update-count
//! collection, and plot-ready JSON/CSV emission.

pub mod data;
pub mod path;
pub mod report;

pub use data::{generate_toy, load_dense_csv, load_libsvm, ToyConfig};
pub use path::{lambda_grid, run_path, PathConfig, PathResult, SolverKind};
pub use report::{emit_results, OutputFormat};
