//! Cyclic coordinate descent applied directly to the non-convex objective.
//!
//! Each visit minimizes the one-dimensional restriction exactly:
//!
//! ```text
//!     argmin_{w_j} 1/2 ||x_j||^2 (w_j - t_j)^2 + r(|w_j|),
//!     t_j = w_j + x_j^T r / ||x_j||^2
//! ```
//!
//! which is the penalty's proximal map with step `1 / ||x_j||^2`. The exact
//! minimization makes the objective non-increasing despite non-convexity.

use alloc::boxed::Box;

use super::{prox_penalty, BaselineError, BaselineSolution, BaselineStats, TraceRow};
use crate::math;
use crate::penalty::Penalty;
use crate::problem::Problem;

#[derive(Debug, Clone)]
pub struct NcvxCdConfig {
    /// Stop when the first-order violation falls below this.
    pub tol: f64,
    pub max_epochs: usize,
}

impl Default for NcvxCdConfig {
    fn default() -> Self {
        NcvxCdConfig {
            tol: 1e-4,
            max_epochs: 100_000,
        }
    }
}

pub fn solve_ncvxcd(
    prob: &Problem,
    p: &Penalty,
    w0: &[f64],
    cfg: &NcvxCdConfig,
) -> Result<BaselineSolution, BaselineError> {
    if w0.len() != prob.n_cols() {
        return Err(BaselineError::Invalid {
            what: "initial iterate length != number of columns",
        });
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(BaselineError::Invalid {
            what: "tolerance must be positive",
        });
    }

    let d = prob.n_cols();
    let mut w = w0.to_vec();
    let mut residual = prob.residual(&w);
    let mut stats = BaselineStats::default();

    let mut kkt = p.kkt_from_correlations(&w, &prob.xt_dot(&residual));
    if kkt.max_violation <= cfg.tol {
        return Ok(BaselineSolution { w, kkt, stats });
    }

    for epoch in 1..=cfg.max_epochs {
        let mut max_delta = 0.0_f64;
        for j in 0..d {
            let norm_sq = prob.col_norm_sq(j);
            stats.updates += 1;
            if norm_sq == 0.0 {
                // a zero column never enters the fit; the penalty picks zero
                max_delta = max_delta.max(math::abs(w[j]));
                w[j] = 0.0;
                continue;
            }
            let t = w[j] + prob.col_dot(j, &residual) / norm_sq;
            let new = prox_penalty(p, t, 1.0 / norm_sq);
            if new != w[j] {
                prob.col_axpy(j, w[j] - new, &mut residual);
                max_delta = max_delta.max(math::abs(new - w[j]));
                w[j] = new;
            }
        }

        residual = prob.residual(&w);
        let xtr = prob.xt_dot(&residual);
        kkt = p.kkt_from_correlations(&w, &xtr);
        stats.iters = epoch;
        stats.trace.push(TraceRow {
            objective: p.objective_from_loss(math::norm_sq(&residual), &w),
            kkt: kkt.max_violation,
        });
        if kkt.max_violation <= cfg.tol {
            return Ok(BaselineSolution { w, kkt, stats });
        }
        if max_delta == 0.0 {
            // exact fixed point of the cycle: every coordinate satisfies its
            // own first-order condition, so the tolerance is below what
            // floating point can certify
            let max_violation = kkt.max_violation;
            return Err(BaselineError::Stalled {
                kkt: max_violation,
                best: Box::new(BaselineSolution { w, kkt, stats }),
            });
        }
    }

    let max_violation = kkt.max_violation;
    Err(BaselineError::MaxIters {
        iters: cfg.max_epochs,
        kkt: max_violation,
        best: Box::new(BaselineSolution { w, kkt, stats }),
    })
}
