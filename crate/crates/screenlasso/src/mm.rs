//! Outer majorization-minimization loop.
//!
//! At iterate `w^k` the concave penalty is linearized at `|w_j^k|`, giving a
//! proximal weighted-lasso subproblem with weights `lam_j^k = r'(|w_j^k|)`
//! and center `w^k`:
//!
//! ```text
//!     w^{k+1} = argmin_w 1/2 ||y - Xw||^2 + 1/(2 alpha) ||w - w^k||^2
//!               + sum_j r'(|w_j^k|) |w_j|
//! ```
//!
//! Each subproblem is solved by [`crate::pwl::solve_pwl`], warm-started at
//! `w^k` and given a list of coordinates already certified zero. That list is
//! rebuilt every iteration: exactly (from a fresh gap certificate) every
//! `exact_rescreen_every` iterations, and in between through the propagation
//! test, which reuses the stored reference scores plus exact bounds on how
//! much the dual candidate moved when the weights changed. The propagation
//! test needs no products with columns of `X`: the inner solver's final
//! residual pass is reused as the approximate primal for the new weights.
//!
//! The loop stops when the first-order conditions of the original non-convex
//! problem hold within `outer_tol`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::math;
use crate::penalty::{KktResidual, Penalty};
use crate::problem::Problem;
use crate::pwl::{
    self, GapCertificate, PwlConfig, PwlError, PwlSpec, ResidualCache, ScreenRadius, ScreenSet,
};

#[derive(Debug, thiserror::Error)]
pub enum MmError {
    #[error("invalid input: {0}")]
    Invalid(#[from] PwlError),
    #[error("inner solver gave up at outer iteration {outer_iter} (inner gap {inner_gap:.3e})")]
    InnerStalled {
        outer_iter: usize,
        inner_gap: f64,
        best: Box<MmSolution>,
    },
    #[error("no convergence after {iters} outer iterations (first-order violation {kkt:.3e})")]
    MaxOuterIters {
        iters: usize,
        kkt: f64,
        best: Box<MmSolution>,
    },
}

/// How screening is used across the solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScreeningMode {
    /// Screen inside inner solves and propagate certified coordinates across
    /// outer iterations.
    #[default]
    Propagate,
    /// Screen inside inner solves only; every inner solve starts from an
    /// empty screen set.
    InnerOnly,
    /// No screening anywhere (the gap is still computed for stopping).
    Off,
}

#[derive(Debug, Clone)]
pub struct MmConfig {
    /// Proximal strength; large values allow large steps away from `w^k`.
    pub alpha: f64,
    /// Stop when the first-order violation of the original problem is below.
    pub outer_tol: f64,
    /// Duality-gap tolerance of each inner solve.
    pub inner_tol: f64,
    /// Outer cadence of exact screening-score computation.
    pub exact_rescreen_every: usize,
    /// Epoch cadence of gap checks inside inner solves.
    pub inner_screen_every: usize,
    pub max_outer_iters: usize,
    pub max_inner_epochs: usize,
    pub screening: ScreeningMode,
    pub radius: ScreenRadius,
}

impl Default for MmConfig {
    fn default() -> Self {
        MmConfig {
            alpha: 1e9,
            outer_tol: 1e-4,
            inner_tol: 1e-4,
            exact_rescreen_every: 10,
            inner_screen_every: 5,
            max_outer_iters: 1000,
            max_inner_epochs: 100_000,
            screening: ScreeningMode::Propagate,
            radius: ScreenRadius::Safe,
        }
    }
}

/// Subproblem weights at the current iterate: `lam_j = r'(|w_j|)`.
///
/// For MCP and SCAD the weight is exactly zero past the flat breakpoint, so
/// large coordinates become unregularized in the next subproblem.
pub fn mm_weights(p: &Penalty, w: &[f64]) -> Vec<f64> {
    w.iter().map(|&wj| p.derivative(math::abs(wj))).collect()
}

/// Screening state stored at the last exact score computation, reused by the
/// propagation test until the next one.
#[derive(Debug, Clone)]
pub struct ScreenReference {
    pub weights: Vec<f64>,
    pub scores: Vec<f64>,
    pub s_hat: Vec<f64>,
    pub v_hat: Vec<f64>,
    pub gap: f64,
}

impl ScreenReference {
    pub fn capture(spec: &PwlSpec, cert: &GapCertificate) -> Self {
        ScreenReference {
            weights: spec.weights().to_vec(),
            scores: cert.scores.clone(),
            s_hat: cert.dual.s.clone(),
            v_hat: cert.dual.v.clone(),
            gap: cert.gap,
        }
    }
}

/// Exact deviations between the reference dual triplet and the candidate
/// built for the new weights: `dual_shift >= ||s_new - s_ref||`,
/// `gap_shift >= |G_new - G_ref|`, `coord_shift[j] >= |v_new_j - v_ref_j|`
/// (all hold with equality here).
#[derive(Debug, Clone)]
pub struct PropagationBounds {
    pub dual_shift: f64,
    pub gap_shift: f64,
    pub coord_shift: Vec<f64>,
}

/// Builds the dual candidate for the new subproblem from the cached residual
/// pass (one elementwise sweep, no matrix products) and measures its exact
/// deviation from the reference.
///
/// `w` and `residual` are the current primal iterate and its residual—the
/// approximate primal solution reused for the new weights; `cache` must hold
/// `X^T residual`.
pub fn propagation_bounds(
    reference: &ScreenReference,
    new_spec: &PwlSpec,
    w: &[f64],
    residual: &[f64],
    cache: &ResidualCache,
) -> (PropagationBounds, GapCertificate) {
    let cert = pwl::dual_point_from_parts(new_spec, w, residual, cache);
    let dual_shift = math::dist(&cert.dual.s, &reference.s_hat);
    let gap_shift = math::abs(cert.gap - reference.gap);
    let coord_shift = cert
        .dual
        .v
        .iter()
        .zip(&reference.v_hat)
        .map(|(a, b)| math::abs(a - b))
        .collect();
    (
        PropagationBounds {
            dual_shift,
            gap_shift,
            coord_shift,
        },
        cert,
    )
}

/// The propagation test: coordinate `j` is certified zero for the new
/// weights iff
///
/// ```text
///     scores_ref[j] + ||x_j|| (a + sqrt(2b)) + c_j + tail(b) < lam_new_j
/// ```
///
/// where `a`, `b`, `c` come from [`propagation_bounds`] and the tail matches
/// the radius convention used for the reference scores. Requires no products
/// with columns of `X`.
pub fn propagate_screen(
    prob: &Problem,
    reference: &ScreenReference,
    bounds: &PropagationBounds,
    new_weights: &[f64],
    alpha: f64,
    radius: ScreenRadius,
) -> ScreenSet {
    let (root_b, tail) = radius.terms(bounds.gap_shift, alpha);
    let mut set = ScreenSet::none(new_weights.len());
    for j in 0..new_weights.len() {
        let bound = reference.scores[j]
            + prob.col_norm(j) * (bounds.dual_shift + root_b)
            + bounds.coord_shift[j]
            + tail;
        if bound < new_weights[j] {
            set.mark(j);
        }
    }
    set
}

/// Per-outer-iteration trace record.
#[derive(Debug, Clone, Copy)]
pub struct OuterRecord {
    pub outer_iter: usize,
    /// Objective of the original non-convex problem at the new iterate.
    pub objective: f64,
    /// First-order violation at the new iterate.
    pub kkt: f64,
    /// Final duality gap of the inner solve.
    pub inner_gap: f64,
    /// Screened coordinates at the end of the inner solve.
    pub screened: usize,
    /// Coordinate updates spent by the inner solve.
    pub updates: u64,
    /// `||lam^k - lam^{k-1}||_inf`; zero for the first iteration.
    pub weight_shift: f64,
}

#[derive(Debug, Clone, Default)]
pub struct MmStats {
    pub outer_iters: usize,
    pub total_updates: u64,
    pub initial_objective: f64,
    pub trace: Vec<OuterRecord>,
}

#[derive(Debug, Clone)]
pub struct MmSolution {
    pub w: Vec<f64>,
    pub kkt: KktResidual,
    pub stats: MmStats,
}

fn screen_where_certified(scores: &[f64], weights: &[f64], w: &[f64]) -> ScreenSet {
    let mut set = ScreenSet::none(w.len());
    for j in 0..w.len() {
        if scores[j] < weights[j] && w[j] == 0.0 {
            set.mark(j);
        }
    }
    set
}

/// Keeps only coordinates whose current value is exactly zero, so the warm
/// start is untouched and the inner solve descends from `P(w^k)`.
fn restrict_to_zeros(set: ScreenSet, w: &[f64]) -> ScreenSet {
    let mut out = ScreenSet::none(w.len());
    for j in 0..w.len() {
        if set.is_screened(j) && w[j] == 0.0 {
            out.mark(j);
        }
    }
    out
}

/// Runs the outer loop from `w0` until the first-order conditions of the
/// penalized problem hold within `cfg.outer_tol`.
pub fn solve_mm(
    prob: &Problem,
    p: &Penalty,
    w0: &[f64],
    cfg: &MmConfig,
    mut on_outer: Option<&mut dyn FnMut(&OuterRecord)>,
) -> Result<MmSolution, MmError> {
    if w0.len() != prob.n_cols() {
        return Err(MmError::Invalid(PwlError::DimensionMismatch {
            what: "initial iterate length != number of columns",
        }));
    }
    if w0.iter().any(|v| !v.is_finite()) {
        return Err(MmError::Invalid(PwlError::InvalidSpec {
            what: "initial iterate must be finite",
        }));
    }
    if !cfg.outer_tol.is_finite()
        || cfg.outer_tol <= 0.0
        || !cfg.inner_tol.is_finite()
        || cfg.inner_tol <= 0.0
    {
        return Err(MmError::Invalid(PwlError::InvalidSpec {
            what: "tolerances must be positive",
        }));
    }
    if cfg.exact_rescreen_every == 0 || cfg.inner_screen_every == 0 || cfg.max_outer_iters == 0 {
        return Err(MmError::Invalid(PwlError::InvalidSpec {
            what: "cadences and iteration caps must be at least 1",
        }));
    }

    let d = prob.n_cols();
    let mut w = w0.to_vec();
    let mut residual = prob.residual(&w);
    let mut cache = ResidualCache::compute(prob, &residual);
    let mut reference: Option<ScreenReference> = None;
    let mut prev_weights: Option<Vec<f64>> = None;

    let mut stats = MmStats {
        initial_objective: p.objective_from_loss(cache.r_norm_sq, &w),
        ..MmStats::default()
    };

    let mut kkt = p.kkt_from_correlations(&w, &cache.xtr);
    if kkt.max_violation <= cfg.outer_tol {
        return Ok(MmSolution { w, kkt, stats });
    }

    let inner_cfg = PwlConfig {
        tol: cfg.inner_tol,
        screen_every: cfg.inner_screen_every,
        max_epochs: cfg.max_inner_epochs,
        radius: cfg.radius,
        screening: cfg.screening != ScreeningMode::Off,
    };

    for k in 0..cfg.max_outer_iters {
        let weights = mm_weights(p, &w);
        let weight_shift = prev_weights.as_ref().map_or(0.0, |prev| {
            weights
                .iter()
                .zip(prev)
                .fold(0.0_f64, |a, (x, y)| a.max(math::abs(x - y)))
        });
        prev_weights = Some(weights.clone());
        let spec = PwlSpec::new(weights, w.clone(), cfg.alpha)?;

        let screen = match cfg.screening {
            ScreeningMode::Off | ScreeningMode::InnerOnly => ScreenSet::none(d),
            ScreeningMode::Propagate => match &reference {
                Some(stored) if k % cfg.exact_rescreen_every != 0 => {
                    let (bounds, _) = propagation_bounds(stored, &spec, &w, &residual, &cache);
                    let set = propagate_screen(
                        prob,
                        stored,
                        &bounds,
                        spec.weights(),
                        cfg.alpha,
                        cfg.radius,
                    );
                    restrict_to_zeros(set, &w)
                }
                _ => {
                    let cert = pwl::dual_point_from_parts(&spec, &w, &residual, &cache);
                    let cert = pwl::screen_scores(prob, &spec, cert, cfg.radius)?;
                    let set = screen_where_certified(&cert.scores, spec.weights(), &w);
                    reference = Some(ScreenReference::capture(&spec, &cert));
                    set
                }
            },
        };

        let inner = match pwl::solve_pwl(prob, &spec, &w, &screen, &inner_cfg, None) {
            Ok(sol) => sol,
            Err(PwlError::MaxEpochs { best, gap, .. }) | Err(PwlError::Stalled { best, gap }) => {
                let sol = *best;
                stats.total_updates += sol.updates;
                stats.outer_iters = k + 1;
                let kkt = p.kkt_from_correlations(&sol.w, &sol.cache.xtr);
                return Err(MmError::InnerStalled {
                    outer_iter: k,
                    inner_gap: gap,
                    best: Box::new(MmSolution {
                        w: sol.w,
                        kkt,
                        stats,
                    }),
                });
            }
            Err(e) => return Err(MmError::Invalid(e)),
        };

        w = inner.w;
        residual = inner.residual;
        cache = inner.cache;
        kkt = p.kkt_from_correlations(&w, &cache.xtr);
        stats.total_updates += inner.updates;
        stats.outer_iters = k + 1;
        let record = OuterRecord {
            outer_iter: k,
            objective: p.objective_from_loss(cache.r_norm_sq, &w),
            kkt: kkt.max_violation,
            inner_gap: inner.certificate.gap,
            screened: inner.screen.count(),
            updates: inner.updates,
            weight_shift,
        };
        if let Some(cb) = on_outer.as_deref_mut() {
            cb(&record);
        }
        stats.trace.push(record);

        if kkt.max_violation <= cfg.outer_tol {
            return Ok(MmSolution { w, kkt, stats });
        }
    }

    let iters = cfg.max_outer_iters;
    let max_violation = kkt.max_violation;
    Err(MmError::MaxOuterIters {
        iters,
        kkt: max_violation,
        best: Box::new(MmSolution { w, kkt, stats }),
    })
}
