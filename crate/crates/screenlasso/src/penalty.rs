//! Concave sparsity penalties: log-sum, MCP and SCAD.
//!
//! Each penalty `r(|w|)` is concave and differentiable on `[0, inf)` with
//! `r(0) = 0`. The solvers only ever need three quantities: the value, the
//! (non-increasing) slope `r'(t)` for `t >= 0`, and the radius of the
//! subdifferential interval at zero, which equals the slope at zero.

use alloc::vec::Vec;

use crate::math;
use crate::problem::Problem;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PenaltyError {
    #[error("lambda must be positive and finite (got {0})")]
    InvalidLambda(f64),
    #[error("theta must exceed {min} for {family:?} (got {theta})")]
    InvalidTheta {
        family: PenaltyFamily,
        min: f64,
        theta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyFamily {
    LogSum,
    Mcp,
    Scad,
}

impl PenaltyFamily {
    /// The penalties are named on the command line by these identifiers.
    pub fn id(&self) -> &'static str {
        match self {
            PenaltyFamily::LogSum => "logsum",
            PenaltyFamily::Mcp => "mcp",
            PenaltyFamily::Scad => "scad",
        }
    }

    fn theta_lower_bound(&self) -> f64 {
        match self {
            PenaltyFamily::LogSum => 0.0,
            PenaltyFamily::Mcp => 1.0,
            PenaltyFamily::Scad => 2.0,
        }
    }
}

impl core::str::FromStr for PenaltyFamily {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logsum" => Ok(PenaltyFamily::LogSum),
            "mcp" => Ok(PenaltyFamily::Mcp),
            "scad" => Ok(PenaltyFamily::Scad),
            _ => Err("expected one of: logsum, mcp, scad"),
        }
    }
}

/// A penalty family instantiated with strength `lambda` and shape `theta`.
///
/// Immutable after construction; all methods are pure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Penalty {
    family: PenaltyFamily,
    lambda: f64,
    theta: f64,
}

impl Penalty {
    pub fn new(family: PenaltyFamily, lambda: f64, theta: f64) -> Result<Self, PenaltyError> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(PenaltyError::InvalidLambda(lambda));
        }
        let min = family.theta_lower_bound();
        if !theta.is_finite() || theta <= min {
            return Err(PenaltyError::InvalidTheta { family, min, theta });
        }
        Ok(Penalty {
            family,
            lambda,
            theta,
        })
    }

    pub fn log_sum(lambda: f64, theta: f64) -> Result<Self, PenaltyError> {
        Self::new(PenaltyFamily::LogSum, lambda, theta)
    }

    pub fn mcp(lambda: f64, theta: f64) -> Result<Self, PenaltyError> {
        Self::new(PenaltyFamily::Mcp, lambda, theta)
    }

    pub fn scad(lambda: f64, theta: f64) -> Result<Self, PenaltyError> {
        Self::new(PenaltyFamily::Scad, lambda, theta)
    }

    pub fn family(&self) -> PenaltyFamily {
        self.family
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `r(|w|)`. Ties at piecewise breakpoints go to the closed branch on
    /// the left (the `<=` branch); the value is continuous either way.
    pub fn value(&self, w: f64) -> f64 {
        let t = math::abs(w);
        let (lam, th) = (self.lambda, self.theta);
        match self.family {
            PenaltyFamily::LogSum => lam * math::ln(1.0 + t / th),
            PenaltyFamily::Mcp => {
                if t <= lam * th {
                    lam * t - t * t / (2.0 * th)
                } else {
                    th * lam * lam / 2.0
                }
            }
            PenaltyFamily::Scad => {
                if t <= lam {
                    lam * t
                } else if t <= lam * th {
                    (-t * t + 2.0 * th * lam * t - lam * lam) / (2.0 * (th - 1.0))
                } else {
                    lam * lam * (th + 1.0) / 2.0
                }
            }
        }
    }

    /// The slope `r'(t)` for `t = |w| >= 0`, non-increasing in `t`.
    ///
    /// At `t = 0` this is the upper endpoint of the subdifferential interval;
    /// that endpoint is the majorizing slope the outer solver must use as a
    /// per-coordinate weight for zero coordinates.
    pub fn derivative(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "derivative takes a magnitude");
        let (lam, th) = (self.lambda, self.theta);
        match self.family {
            PenaltyFamily::LogSum => lam / (th + t),
            PenaltyFamily::Mcp => {
                if t <= lam * th {
                    lam - t / th
                } else {
                    0.0
                }
            }
            PenaltyFamily::Scad => {
                if t <= lam {
                    lam
                } else if t <= lam * th {
                    (th * lam - t) / (th - 1.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// Radius of the subdifferential interval at zero: `lambda/theta` for
    /// log-sum, `lambda` for MCP and SCAD.
    pub fn zero_radius(&self) -> f64 {
        self.derivative(0.0)
    }

    /// The critical strength above which `w = 0` satisfies the first-order
    /// optimality conditions: `max_j |x_j^T y|`, scaled by `theta` for
    /// log-sum.
    pub fn lambda_max(&self, prob: &Problem) -> f64 {
        lambda_max(self.family, self.theta, prob)
    }

    /// Per-coordinate violation of the first-order (Fermat) conditions at `w`.
    ///
    /// For `w_j != 0` this is the absolute stationarity defect
    /// `|x_j^T (y - Xw) - sign(w_j) r'(|w_j|)|`; for `w_j = 0` the positive
    /// part of `|x_j^T (y - Xw)|` minus the subdifferential radius at zero.
    pub fn kkt_residual(&self, prob: &Problem, w: &[f64]) -> KktResidual {
        let grad = prob.xt_dot(&prob.residual(w));
        self.kkt_from_correlations(w, &grad)
    }

    /// Same as [`Penalty::kkt_residual`] but from precomputed correlations
    /// `X^T (y - Xw)`, so callers holding that vector pay no matrix pass.
    pub fn kkt_from_correlations(&self, w: &[f64], xtr: &[f64]) -> KktResidual {
        debug_assert_eq!(w.len(), xtr.len());
        let radius0 = self.zero_radius();
        let per_coordinate: Vec<f64> = w
            .iter()
            .zip(xtr)
            .map(|(&wj, &g)| {
                if wj == 0.0 {
                    (math::abs(g) - radius0).max(0.0)
                } else {
                    math::abs(g - math::signum(wj) * self.derivative(math::abs(wj)))
                }
            })
            .collect();
        KktResidual::new(per_coordinate)
    }

    /// The full objective `1/2 ||y - Xw||^2 + sum_j r(|w_j|)`.
    pub fn objective(&self, prob: &Problem, w: &[f64]) -> f64 {
        0.5 * math::norm_sq(&prob.residual(w)) + self.penalty_sum(w)
    }

    pub(crate) fn objective_from_loss(&self, residual_norm_sq: f64, w: &[f64]) -> f64 {
        0.5 * residual_norm_sq + self.penalty_sum(w)
    }

    fn penalty_sum(&self, w: &[f64]) -> f64 {
        w.iter().map(|&wj| self.value(wj)).sum()
    }
}

/// `lambda_max` without constructing a penalty (the strength itself does not
/// enter the formula, only the family and shape).
pub fn lambda_max(family: PenaltyFamily, theta: f64, prob: &Problem) -> f64 {
    let max_corr = prob
        .xty()
        .iter()
        .fold(0.0_f64, |acc, &v| acc.max(math::abs(v)));
    match family {
        PenaltyFamily::LogSum => theta * max_corr,
        PenaltyFamily::Mcp | PenaltyFamily::Scad => max_corr,
    }
}

/// Per-coordinate first-order violations and their maximum.
#[derive(Debug, Clone)]
pub struct KktResidual {
    pub max_violation: f64,
    pub per_coordinate: Vec<f64>,
}

impl KktResidual {
    pub fn new(per_coordinate: Vec<f64>) -> Self {
        let max_violation = per_coordinate.iter().fold(0.0_f64, |a, &b| a.max(b));
        KktResidual {
            max_violation,
            per_coordinate,
        }
    }
}
