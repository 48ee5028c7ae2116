//! Proximal weighted lasso: cyclic coordinate descent with duality-gap
//! computation and gap-based safe screening.
//!
//! The primal problem is
//!
//! ```text
//!     P(w) = 1/2 ||y - X w||^2 + 1/(2 alpha) ||w - w'||^2 + sum_j lam_j |w_j|
//! ```
//!
//! with per-coordinate weights `lam_j >= 0`, proximal center `w'` and
//! strength `alpha > 0`. Its dual, over `s` (length n) and `v` (length d)
//! subject to `|x_j^T s - v_j| <= lam_j`, is
//!
//! ```text
//!     D(s, v) = -1/2 ||s||^2 - alpha/2 ||v||^2 + s^T y - v^T w'
//! ```
//!
//! A feasible dual pair is built from any residual by scaling it with the
//! largest constraint ratio; the resulting duality gap bounds the distance to
//! the dual optimum, which yields a per-coordinate screening test: when the
//! test value stays strictly below `lam_j`, coordinate `j` of the optimum is
//! exactly zero and can be fixed for the rest of the solve.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::problem::Problem;

/// Slack on feasibility and gap-sign checks, absorbing round-off only.
pub const CERTIFICATE_SLACK: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum PwlError {
    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: &'static str },
    #[error("invalid subproblem: {what}")]
    InvalidSpec { what: &'static str },
    #[error("warm start is nonzero at screened coordinate {j}")]
    ScreenedNonzero { j: usize },
    #[error("dual point violates feasibility by {violation:.3e}")]
    InfeasibleDual { violation: f64 },
    #[error("negative duality gap {gap:.3e}; primal-dual bookkeeping is broken")]
    NegativeGap { gap: f64 },
    #[error("no convergence after {epochs} epochs, gap {gap:.3e}")]
    MaxEpochs {
        epochs: usize,
        gap: f64,
        best: Box<PwlSolution>,
    },
    #[error("coordinate descent fixed point with gap {gap:.3e} above tolerance")]
    Stalled { gap: f64, best: Box<PwlSolution> },
}

/// One inner subproblem: weights, proximal center and proximal strength.
#[derive(Debug, Clone)]
pub struct PwlSpec {
    weights: Vec<f64>,
    center: Vec<f64>,
    alpha: f64,
}

impl PwlSpec {
    pub fn new(weights: Vec<f64>, center: Vec<f64>, alpha: f64) -> Result<Self, PwlError> {
        if weights.len() != center.len() {
            return Err(PwlError::DimensionMismatch {
                what: "weights and center lengths differ",
            });
        }
        if weights.iter().any(|&l| !l.is_finite() || l < 0.0) {
            return Err(PwlError::InvalidSpec {
                what: "weights must be non-negative and finite",
            });
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(PwlError::InvalidSpec {
                what: "center must be finite",
            });
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(PwlError::InvalidSpec {
                what: "alpha must be positive and finite",
            });
        }
        Ok(PwlSpec {
            weights,
            center,
            alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// A dual-feasible pair `(s, v)`.
#[derive(Debug, Clone)]
pub struct DualPoint {
    pub s: Vec<f64>,
    pub v: Vec<f64>,
}

/// Dual point, duality gap and per-coordinate screening scores at one primal
/// iterate. `correlations[j] = |x_j^T s - v_j|`; `scores` adds the gap-based
/// radius and is what the screening test compares against `lam_j`.
#[derive(Debug, Clone)]
pub struct GapCertificate {
    pub dual: DualPoint,
    pub gap: f64,
    pub rho_max: f64,
    pub correlations: Vec<f64>,
    pub scores: Vec<f64>,
}

/// Which radius multiplies the gap term of the screening test.
///
/// The bound provable from strong concavity of the dual is
/// `sqrt(2G) ||x_j|| + sqrt(2G/alpha)`; [`ScreenRadius::Safe`] uses it and is
/// the default. [`ScreenRadius::Compact`] uses the more aggressive
/// `sqrt(2G) (||x_j|| + 1/alpha)`, which is smaller whenever `alpha > 1`; it
/// is kept for reproducing results computed with that convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScreenRadius {
    #[default]
    Safe,
    Compact,
}

impl ScreenRadius {
    /// `(sqrt(2g), tail)` for a gap-like quantity `g >= 0`; the tail carries
    /// the convention difference between the two radii.
    #[inline]
    pub(crate) fn terms(self, gap: f64, alpha: f64) -> (f64, f64) {
        let root = math::sqrt(2.0 * gap.max(0.0));
        match self {
            ScreenRadius::Safe => (root, root / math::sqrt(alpha)),
            ScreenRadius::Compact => (root, root / alpha),
        }
    }
}

/// Coordinates fixed at zero for the remainder of a solve.
#[derive(Debug, Clone)]
pub struct ScreenSet {
    flags: Vec<bool>,
    count: usize,
}

impl ScreenSet {
    pub fn none(d: usize) -> Self {
        ScreenSet {
            flags: vec![false; d],
            count: 0,
        }
    }

    pub fn from_flags(flags: Vec<bool>) -> Self {
        let count = flags.iter().filter(|&&f| f).count();
        ScreenSet { flags, count }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn is_screened(&self, j: usize) -> bool {
        self.flags[j]
    }

    pub fn mark(&mut self, j: usize) {
        if !self.flags[j] {
            self.flags[j] = true;
            self.count += 1;
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }
}

/// `X^T r` together with the scalars needed to form objectives without
/// another matrix pass. Returned by the solver so that the caller can reuse
/// the final pass (weight updates, first-order checks, screening
/// propagation) at no extra cost.
#[derive(Debug, Clone)]
pub struct ResidualCache {
    pub xtr: Vec<f64>,
    pub r_norm_sq: f64,
    pub r_dot_y: f64,
}

impl ResidualCache {
    pub fn compute(prob: &Problem, residual: &[f64]) -> Self {
        ResidualCache {
            xtr: prob.xt_dot(residual),
            r_norm_sq: math::norm_sq(residual),
            r_dot_y: math::dot(residual, prob.y()),
        }
    }
}

fn check_dims(prob: &Problem, spec: &PwlSpec, w: &[f64]) -> Result<(), PwlError> {
    if spec.dim() != prob.n_cols() {
        return Err(PwlError::DimensionMismatch {
            what: "subproblem dimension != number of columns",
        });
    }
    if w.len() != prob.n_cols() {
        return Err(PwlError::DimensionMismatch {
            what: "coefficient length != number of columns",
        });
    }
    Ok(())
}

/// `P(w)`: loss + proximal term + weighted l1.
pub fn primal_objective(prob: &Problem, spec: &PwlSpec, w: &[f64]) -> Result<f64, PwlError> {
    check_dims(prob, spec, w)?;
    let r = prob.residual(w);
    Ok(primal_from_loss(spec, w, math::norm_sq(&r)))
}

fn primal_from_loss(spec: &PwlSpec, w: &[f64], r_norm_sq: f64) -> f64 {
    let prox: f64 = w
        .iter()
        .zip(&spec.center)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let l1: f64 = w
        .iter()
        .zip(&spec.weights)
        .map(|(a, l)| l * math::abs(*a))
        .sum();
    0.5 * r_norm_sq + prox / (2.0 * spec.alpha) + l1
}

/// Largest feasibility violation `max_j (|x_j^T s - v_j| - lam_j)_+`.
pub fn dual_violation(prob: &Problem, spec: &PwlSpec, dp: &DualPoint) -> f64 {
    let xts = prob.xt_dot(&dp.s);
    xts.iter()
        .zip(&dp.v)
        .zip(&spec.weights)
        .map(|((&g, &vj), &l)| (math::abs(g - vj) - l).max(0.0))
        .fold(0.0_f64, f64::max)
}

/// `D(s, v)`; errors if the pair is infeasible beyond `1e-6`, which signals a
/// construction bug rather than round-off.
pub fn dual_objective(prob: &Problem, spec: &PwlSpec, dp: &DualPoint) -> Result<f64, PwlError> {
    if dp.s.len() != prob.n_rows() || dp.v.len() != prob.n_cols() {
        return Err(PwlError::DimensionMismatch {
            what: "dual point dimensions",
        });
    }
    let violation = dual_violation(prob, spec, dp);
    if violation > 1e-6 {
        return Err(PwlError::InfeasibleDual { violation });
    }
    Ok(dual_value(spec, dp, math::dot(&dp.s, prob.y())))
}

fn dual_value(spec: &PwlSpec, dp: &DualPoint, s_dot_y: f64) -> f64 {
    -0.5 * math::norm_sq(&dp.s) - 0.5 * spec.alpha * math::norm_sq(&dp.v) + s_dot_y
        - math::dot(&dp.v, &spec.center)
}

/// One coordinate of the cyclic descent: soft-threshold update
///
/// ```text
///     w_j <- sign(t) max(0, |t| - lam_j) / (||x_j||^2 + 1/alpha),
///     t = x_j^T r + ||x_j||^2 w_j + w'_j / alpha
/// ```
///
/// `residual` must equal `y - Xw` on entry and is kept consistent.
pub fn cd_update(prob: &Problem, spec: &PwlSpec, w: &mut [f64], residual: &mut [f64], j: usize) {
    let norm_sq = prob.col_norm_sq(j);
    let inv_alpha = 1.0 / spec.alpha;
    let t = prob.col_dot(j, residual) + norm_sq * w[j] + spec.center[j] * inv_alpha;
    let new = math::signum(t) * (math::abs(t) - spec.weights[j]).max(0.0) / (norm_sq + inv_alpha);
    if new != w[j] {
        prob.col_axpy(j, w[j] - new, residual);
        w[j] = new;
    }
}

/// Builds a feasible dual pair from the residual at `w`, plus its duality gap.
///
/// With `S = {j : lam_j > 0}` and `rho(j) = |x_j^T r - (w_j - w'_j)/alpha| / lam_j`,
/// the residual is scaled by `rho_max = max(1, max_{j in S} rho(j))`:
/// `s = r / rho_max`, `v_j = (w_j - w'_j)/(alpha rho_max)` on `S` and
/// `v_j = x_j^T s` elsewhere. Feasibility holds by construction. The returned
/// `scores` equal the raw correlations; apply [`screen_scores`] to add the
/// gap radius before testing.
pub fn dual_point(prob: &Problem, spec: &PwlSpec, w: &[f64], residual: &[f64]) -> GapCertificate {
    let cache = ResidualCache::compute(prob, residual);
    dual_point_from_parts(spec, w, residual, &cache)
}

/// Same construction from a precomputed [`ResidualCache`]; a single
/// elementwise pass, no matrix products.
pub fn dual_point_from_parts(
    spec: &PwlSpec,
    w: &[f64],
    residual: &[f64],
    cache: &ResidualCache,
) -> GapCertificate {
    let d = spec.dim();
    let alpha = spec.alpha;
    let mut rho_max = 1.0_f64;
    for j in 0..d {
        let lam = spec.weights[j];
        if lam > 0.0 {
            let rho = math::abs(cache.xtr[j] - (w[j] - spec.center[j]) / alpha) / lam;
            if rho > rho_max {
                rho_max = rho;
            }
        }
    }
    let inv_rho = 1.0 / rho_max;
    let s: Vec<f64> = residual.iter().map(|&ri| ri * inv_rho).collect();
    let mut v = vec![0.0; d];
    let mut correlations = vec![0.0; d];
    for j in 0..d {
        if spec.weights[j] > 0.0 {
            v[j] = (w[j] - spec.center[j]) * inv_rho / alpha;
            correlations[j] = math::abs(cache.xtr[j] * inv_rho - v[j]);
        } else {
            v[j] = cache.xtr[j] * inv_rho;
        }
    }
    let primal = primal_from_loss(spec, w, cache.r_norm_sq);
    let dual_val = {
        let s_norm_sq = cache.r_norm_sq * inv_rho * inv_rho;
        -0.5 * s_norm_sq - 0.5 * alpha * math::norm_sq(&v) + cache.r_dot_y * inv_rho
            - math::dot(&v, &spec.center)
    };
    let gap = primal - dual_val;
    debug_assert!(
        gap >= -CERTIFICATE_SLACK * (1.0 + math::abs(primal)),
        "weak duality violated: gap = {gap}"
    );
    debug_assert!(
        correlations
            .iter()
            .zip(&spec.weights)
            .all(|(&c, &l)| c <= l + CERTIFICATE_SLACK),
        "dual point infeasible by construction"
    );
    let scores = correlations.clone();
    GapCertificate {
        dual: DualPoint { s, v },
        gap,
        rho_max,
        correlations,
        scores,
    }
}

/// Adds the gap-based radius to the correlations:
/// `scores[j] = |x_j^T s - v_j| + sqrt(2G) ||x_j|| + tail`, with the tail set
/// by the radius convention. Coordinate `j` is screenable iff
/// `scores[j] < lam_j`.
pub fn screen_scores(
    prob: &Problem,
    spec: &PwlSpec,
    mut cert: GapCertificate,
    radius: ScreenRadius,
) -> Result<GapCertificate, PwlError> {
    if cert.gap < -CERTIFICATE_SLACK {
        return Err(PwlError::NegativeGap { gap: cert.gap });
    }
    let (root, tail) = radius.terms(cert.gap, spec.alpha);
    cert.scores = cert
        .correlations
        .iter()
        .zip(prob.col_norms())
        .map(|(&c, &nrm)| c + root * nrm + tail)
        .collect();
    Ok(cert)
}

/// Solver configuration. `screen_every` is the epoch cadence of gap checks;
/// screening can be disabled while keeping the gap-based stopping rule.
#[derive(Debug, Clone)]
pub struct PwlConfig {
    pub tol: f64,
    pub screen_every: usize,
    pub max_epochs: usize,
    pub radius: ScreenRadius,
    pub screening: bool,
}

impl Default for PwlConfig {
    fn default() -> Self {
        PwlConfig {
            tol: 1e-4,
            screen_every: 5,
            max_epochs: 100_000,
            radius: ScreenRadius::Safe,
            screening: true,
        }
    }
}

/// Emitted at every gap check for diagnostic tracing.
#[derive(Debug, Clone, Copy)]
pub struct GapCheck {
    pub epoch: usize,
    pub gap: f64,
    pub screened: usize,
}

#[derive(Debug, Clone)]
pub struct PwlSolution {
    pub w: Vec<f64>,
    pub residual: Vec<f64>,
    pub certificate: GapCertificate,
    pub screen: ScreenSet,
    /// Individual coordinate updates performed (one per coordinate visit).
    pub updates: u64,
    pub epochs: usize,
    pub cache: ResidualCache,
}

/// Cyclic coordinate descent over unscreened coordinates, with a gap check
/// every `screen_every` epochs that grows the screen set and decides
/// termination (`gap <= tol`).
///
/// Screening only ever marks coordinates whose current value is exactly zero;
/// a coordinate certified zero but still carrying a nonzero value stays
/// active until the soft threshold lands it on zero, so the primal objective
/// is non-increasing through the entire solve.
pub fn solve_pwl(
    prob: &Problem,
    spec: &PwlSpec,
    w0: &[f64],
    screen0: &ScreenSet,
    cfg: &PwlConfig,
    mut on_check: Option<&mut dyn FnMut(&GapCheck)>,
) -> Result<PwlSolution, PwlError> {
    check_dims(prob, spec, w0)?;
    if screen0.len() != prob.n_cols() {
        return Err(PwlError::DimensionMismatch {
            what: "screen set length != number of columns",
        });
    }
    if cfg.screen_every == 0 {
        return Err(PwlError::InvalidSpec {
            what: "screen_every must be at least 1",
        });
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(PwlError::InvalidSpec {
            what: "tolerance must be positive",
        });
    }
    for j in 0..w0.len() {
        if screen0.is_screened(j) && w0[j] != 0.0 {
            return Err(PwlError::ScreenedNonzero { j });
        }
    }

    let d = prob.n_cols();
    let mut w = w0.to_vec();
    let mut screen = screen0.clone();
    let mut residual = prob.residual(&w);
    let mut updates: u64 = 0;
    #[cfg(debug_assertions)]
    let mut last_primal = f64::INFINITY;

    let mut epoch = 0;
    while epoch < cfg.max_epochs {
        epoch += 1;
        let mut max_delta = 0.0_f64;
        for j in 0..d {
            if screen.is_screened(j) {
                continue;
            }
            let old = w[j];
            cd_update(prob, spec, &mut w, &mut residual, j);
            updates += 1;
            max_delta = max_delta.max(math::abs(w[j] - old));
        }

        let fixed_point = max_delta == 0.0;
        if epoch % cfg.screen_every != 0 && !fixed_point {
            continue;
        }

        // Refresh the residual so the certificate is exact, guarding the
        // incremental updates against drift.
        let fresh = prob.residual(&w);
        debug_assert!({
            let y_scale = prob.y().iter().fold(0.0_f64, |a, &b| a.max(math::abs(b)));
            residual
                .iter()
                .zip(&fresh)
                .all(|(a, b)| math::abs(a - b) <= 1e-8 * (1.0 + y_scale))
        });
        residual = fresh;
        let cache = ResidualCache::compute(prob, &residual);
        let cert = dual_point_from_parts(spec, &w, &residual, &cache);
        if cert.gap < -CERTIFICATE_SLACK {
            return Err(PwlError::NegativeGap { gap: cert.gap });
        }
        let cert = screen_scores(prob, spec, cert, cfg.radius)?;

        #[cfg(debug_assertions)]
        {
            let primal = primal_from_loss(spec, &w, cache.r_norm_sq);
            debug_assert!(
                primal <= last_primal + 1e-12 * (1.0 + math::abs(primal)),
                "primal objective increased between checks"
            );
            last_primal = primal;
        }

        if cfg.screening {
            for j in 0..d {
                if !screen.is_screened(j) && w[j] == 0.0 && cert.scores[j] < spec.weights[j] {
                    screen.mark(j);
                }
            }
        }

        if let Some(cb) = on_check.as_deref_mut() {
            cb(&GapCheck {
                epoch,
                gap: cert.gap,
                screened: screen.count(),
            });
        }

        let solution = |w: Vec<f64>, residual: Vec<f64>, screen: ScreenSet| PwlSolution {
            w,
            residual,
            certificate: cert.clone(),
            screen,
            updates,
            epochs: epoch,
            cache: cache.clone(),
        };
        if cert.gap <= cfg.tol {
            return Ok(solution(w, residual, screen));
        }
        if fixed_point {
            // Exact fixed point of the cycle: the iterate is optimal for this
            // convex separable problem, so the requested tolerance sits below
            // what floating point can certify.
            let gap = cert.gap;
            return Err(PwlError::Stalled {
                gap,
                best: Box::new(solution(w, residual, screen)),
            });
        }
    }

    let residual = prob.residual(&w);
    let cache = ResidualCache::compute(prob, &residual);
    let cert = dual_point_from_parts(spec, &w, &residual, &cache);
    let cert = screen_scores(prob, spec, cert, cfg.radius)?;
    let gap = cert.gap;
    Err(PwlError::MaxEpochs {
        epochs: epoch,
        gap,
        best: Box::new(PwlSolution {
            w,
            residual,
            certificate: cert,
            screen,
            updates,
            epochs: epoch,
            cache,
        }),
    })
}
