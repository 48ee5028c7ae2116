//! Non-screening baselines: a proximal gradient method with monotone line
//! search and a direct non-convex coordinate descent. Both share the penalty
//! and first-order stopping machinery with the main solver, so measured
//! differences isolate the contribution of screening.

mod gist;
mod ncvxcd;
mod prox;

pub use gist::{solve_gist, GistConfig};
pub use ncvxcd::{solve_ncvxcd, NcvxCdConfig};
pub use prox::prox_penalty;

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::penalty::KktResidual;

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error("invalid input: {what}")]
    Invalid { what: &'static str },
    #[error("no convergence after {iters} iterations (first-order violation {kkt:.3e})")]
    MaxIters {
        iters: usize,
        kkt: f64,
        best: Box<BaselineSolution>,
    },
    #[error("line search stalled (first-order violation {kkt:.3e})")]
    Stalled { kkt: f64, best: Box<BaselineSolution> },
}

/// Objective and first-order violation after one iteration (an epoch for the
/// coordinate method, an accepted step for the gradient method).
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub objective: f64,
    pub kkt: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BaselineStats {
    pub iters: usize,
    /// Coordinate updates, counted as in the screening solver: one unit per
    /// coordinate visited (the gradient method counts `d` per proximal pass).
    pub updates: u64,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Clone)]
pub struct BaselineSolution {
    pub w: Vec<f64>,
    pub kkt: KktResidual,
    pub stats: BaselineStats,
}
