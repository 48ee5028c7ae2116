//! Solvers for least-squares regression with non-convex sparse penalties.
//!
//! The regularized problem is
//!
//! ```text
//!     min_w  1/2 ||y - X w||^2 + sum_j r(|w_j|)
//! ```
//!
//! where `r` is a concave penalty from the log-sum / MCP / SCAD family.
//! The main solver ([`mm::solve_mm`]) iteratively linearizes the penalty and
//! solves the resulting proximal weighted-lasso subproblems by cyclic
//! coordinate descent ([`pwl::solve_pwl`]). Each inner solve discards
//! provably-zero coordinates through a duality-gap safe screening test, and
//! screening information is carried across outer iterations through exact
//! perturbation bounds ([`mm::propagate_screen`]).
//!
//! Two non-screening baselines are provided in [`baselines`]: a proximal
//! gradient method with line search and a direct non-convex coordinate
//! descent. Both share the penalty and stopping machinery so that solver
//! comparisons isolate the effect of screening.
//!
//! The crate is `no_std` (with `alloc`); data loading, benchmarking and the
//! command-line interface live in the companion `screenlasso-cli` crate.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baselines;
mod math;
pub mod mm;
pub mod penalty;
pub mod problem;
pub mod pwl;

pub use penalty::{KktResidual, Penalty, PenaltyFamily};
pub use problem::Problem;
pub use pwl::{GapCertificate, PwlConfig, PwlSpec, ScreenRadius, ScreenSet};
