//! Proximal gradient with Barzilai-Borwein steps and monotone backtracking.
//!
//! Iterates `w <- prox_{step * r}(w - step * grad f(w))` with
//! `f(w) = 1/2 ||y - Xw||^2`, shrinking the step until the objective
//! satisfies a sufficient-decrease condition. The proximal map is applied
//! coordinate-wise through [`prox_penalty`].

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{prox_penalty, BaselineError, BaselineSolution, BaselineStats, TraceRow};
use crate::math;
use crate::penalty::Penalty;
use crate::problem::Problem;

#[derive(Debug, Clone)]
pub struct GistConfig {
    pub step_init: f64,
    /// Initialize each step with the Barzilai-Borwein ratio
    /// `(s^T s) / (s^T q)` from the last two gradients.
    pub bb_steps: bool,
    /// Backtracking divisor, > 1.
    pub eta: f64,
    /// Sufficient-decrease constant in (0, 1): accept `u` when
    /// `F(u) <= F(w) - sigma/(2 step) ||u - w||^2`.
    pub sigma: f64,
    pub max_iters: usize,
    pub max_line_search: usize,
    pub step_min: f64,
    pub step_max: f64,
}

impl Default for GistConfig {
    fn default() -> Self {
        GistConfig {
            step_init: 1.0,
            bb_steps: true,
            eta: 2.0,
            sigma: 0.1,
            max_iters: 20_000,
            max_line_search: 60,
            step_min: 1e-12,
            step_max: 1e12,
        }
    }
}

pub fn solve_gist(
    prob: &Problem,
    p: &Penalty,
    w0: &[f64],
    cfg: &GistConfig,
    tol: f64,
) -> Result<BaselineSolution, BaselineError> {
    if w0.len() != prob.n_cols() {
        return Err(BaselineError::Invalid {
            what: "initial iterate length != number of columns",
        });
    }
    let sigma_ok = cfg.sigma > 0.0 && cfg.sigma < 1.0;
    if cfg.eta.is_nan() || cfg.eta <= 1.0 || !sigma_ok || cfg.step_init.is_nan() || cfg.step_init <= 0.0 {
        return Err(BaselineError::Invalid {
            what: "need eta > 1, sigma in (0,1) and a positive initial step",
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(BaselineError::Invalid {
            what: "tolerance must be positive",
        });
    }

    let d = prob.n_cols();
    let mut w = w0.to_vec();
    let mut residual = prob.residual(&w);
    let mut xtr = prob.xt_dot(&residual);
    let mut f_val = p.objective_from_loss(math::norm_sq(&residual), &w);
    let mut stats = BaselineStats::default();

    let mut kkt = p.kkt_from_correlations(&w, &xtr);
    if kkt.max_violation <= tol {
        return Ok(BaselineSolution { w, kkt, stats });
    }

    let mut step = cfg.step_init.clamp(cfg.step_min, cfg.step_max);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None; // (w, xtr) of the last iterate

    for iter in 1..=cfg.max_iters {
        if cfg.bb_steps {
            if let Some((w_prev, xtr_prev)) = &prev {
                // grad = -xtr, so s^T q = s^T (xtr_prev - xtr)
                let mut ss = 0.0;
                let mut sq = 0.0;
                for j in 0..d {
                    let s_j = w[j] - w_prev[j];
                    ss += s_j * s_j;
                    sq += s_j * (xtr_prev[j] - xtr[j]);
                }
                if sq > 0.0 && ss > 0.0 {
                    step = (ss / sq).clamp(cfg.step_min, cfg.step_max);
                }
            }
        }

        let mut accepted: Option<(Vec<f64>, Vec<f64>, f64)> = None;
        for _ in 0..cfg.max_line_search {
            // grad f = -X^T r, so the forward point is w + step * xtr
            let u: Vec<f64> = (0..d)
                .map(|j| prox_penalty(p, w[j] + step * xtr[j], step))
                .collect();
            stats.updates += d as u64;
            let diff_sq: f64 = u
                .iter()
                .zip(&w)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if diff_sq > 0.0 {
                let r_u = prob.residual(&u);
                let f_u = p.objective_from_loss(math::norm_sq(&r_u), &u);
                if f_u <= f_val - 0.5 * cfg.sigma / step * diff_sq {
                    accepted = Some((u, r_u, f_u));
                    break;
                }
            }
            step /= cfg.eta;
            if step < cfg.step_min {
                break;
            }
        }

        let Some((u, r_u, f_u)) = accepted else {
            // fixed point of the proximal map at every tried step
            let max_violation = kkt.max_violation;
            return Err(BaselineError::Stalled {
                kkt: max_violation,
                best: Box::new(BaselineSolution { w, kkt, stats }),
            });
        };

        prev = Some((core::mem::replace(&mut w, u), core::mem::take(&mut xtr)));
        residual = r_u;
        xtr = prob.xt_dot(&residual);
        f_val = f_u;
        kkt = p.kkt_from_correlations(&w, &xtr);
        stats.iters = iter;
        stats.trace.push(TraceRow {
            objective: f_val,
            kkt: kkt.max_violation,
        });
        if kkt.max_violation <= tol {
            return Ok(BaselineSolution { w, kkt, stats });
        }
    }

    let max_violation = kkt.max_violation;
    Err(BaselineError::MaxIters {
        iters: cfg.max_iters,
        kkt: max_violation,
        best: Box::new(BaselineSolution { w, kkt, stats }),
    })
}
