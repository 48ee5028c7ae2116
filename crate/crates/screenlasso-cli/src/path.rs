//! Regularization-path runs: a decreasing lambda grid per theta, warm starts
//! along each sweep, and per-grid-point timing and work accounting.

use std::time::Instant;

use serde::Serialize;

use screenlasso::baselines::{
    solve_gist, solve_ncvxcd, BaselineError, GistConfig, NcvxCdConfig,
};
use screenlasso::mm::{solve_mm, MmConfig, MmError, ScreeningMode};
use screenlasso::penalty::{lambda_max, Penalty, PenaltyFamily};
use screenlasso::problem::Problem;
use screenlasso::pwl::ScreenRadius;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    MmScreen,
    MmGenuine,
    MmNoScreen,
    NcvxCd,
    Gist,
}

impl SolverKind {
    pub fn id(&self) -> &'static str {
        match self {
            SolverKind::MmScreen => "mm-screen",
            SolverKind::MmGenuine => "mm-genuine",
            SolverKind::MmNoScreen => "mm-noscreen",
            SolverKind::NcvxCd => "ncvxcd",
            SolverKind::Gist => "gist",
        }
    }
}

impl core::str::FromStr for SolverKind {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mm-screen" => Ok(SolverKind::MmScreen),
            "mm-genuine" => Ok(SolverKind::MmGenuine),
            "mm-noscreen" => Ok(SolverKind::MmNoScreen),
            "ncvxcd" => Ok(SolverKind::NcvxCd),
            "gist" => Ok(SolverKind::Gist),
            _ => Err("expected one of: mm-screen, mm-genuine, mm-noscreen, ncvxcd, gist"),
        }
    }
}

impl core::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone)]
pub struct PathConfig {
    pub n_lambdas: usize,
    /// Orders of magnitude covered by the grid below `lambda_max`.
    pub lambda_decades: f64,
    pub thetas: Vec<f64>,
    /// First-order stopping tolerance shared by every solver on the path.
    pub tol: f64,
    pub solver: SolverKind,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            n_lambdas: 50,
            lambda_decades: 3.0,
            thetas: vec![0.01, 0.1, 1.0],
            tol: 1e-4,
            solver: SolverKind::MmScreen,
        }
    }
}

/// `lambda_t = lambda_max * 10^(-decades * t / (n - 1))`, strictly
/// decreasing; a single-point grid is just `lambda_max`.
pub fn lambda_grid(lambda_max: f64, n_lambdas: usize, decades: f64) -> Vec<f64> {
    if n_lambdas <= 1 {
        return vec![lambda_max];
    }
    (0..n_lambdas)
        .map(|t| lambda_max * 10f64.powf(-decades * t as f64 / (n_lambdas - 1) as f64))
        .collect()
}

/// One record per `(theta, lambda)` grid point.
#[derive(Debug, Clone, Serialize)]
pub struct GridPoint {
    pub theta: f64,
    pub lambda_index: usize,
    pub lambda: f64,
    /// `"ok"` or the solver's error message.
    pub status: String,
    pub nnz: usize,
    pub objective: f64,
    pub kkt: f64,
    pub wall_time_s: f64,
    pub updates: u64,
    pub outer_iters: usize,
    pub screened_per_outer: Vec<usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PathTotals {
    pub updates: u64,
    pub wall_time_s: f64,
    pub solved: usize,
    pub failed: usize,
}

/// Echo of the configuration a result was produced under.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub solver: String,
    pub penalty: String,
    pub thetas: Vec<f64>,
    pub n_lambdas: usize,
    pub lambda_decades: f64,
    pub tol: f64,
    pub inner_tol: f64,
    pub alpha: f64,
    pub screen_every_inner: usize,
    pub rescreen_every_outer: usize,
    pub radius: String,
    pub dataset: String,
    pub seed: Option<u64>,
    pub normalize: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathResult {
    pub config: RunMeta,
    pub points: Vec<GridPoint>,
    pub totals: PathTotals,
}

struct Outcome {
    w: Vec<f64>,
    status: String,
    kkt: f64,
    updates: u64,
    outer_iters: usize,
    screened_per_outer: Vec<usize>,
}

fn run_mm(
    prob: &Problem,
    p: &Penalty,
    w0: &[f64],
    cfg: &MmConfig,
) -> Outcome {
    match solve_mm(prob, p, w0, cfg, None) {
        Ok(sol) => Outcome {
            status: "ok".into(),
            kkt: sol.kkt.max_violation,
            updates: sol.stats.total_updates,
            outer_iters: sol.stats.outer_iters,
            screened_per_outer: sol.stats.trace.iter().map(|r| r.screened).collect(),
            w: sol.w,
        },
        Err(MmError::MaxOuterIters { best, .. }) | Err(MmError::InnerStalled { best, .. }) => {
            Outcome {
                status: "error: no convergence within iteration budget".into(),
                kkt: best.kkt.max_violation,
                updates: best.stats.total_updates,
                outer_iters: best.stats.outer_iters,
                screened_per_outer: best.stats.trace.iter().map(|r| r.screened).collect(),
                w: best.w,
            }
        }
        Err(e) => Outcome {
            status: format!("error: {e}"),
            kkt: f64::MAX,
            updates: 0,
            outer_iters: 0,
            screened_per_outer: Vec::new(),
            w: w0.to_vec(),
        },
    }
}

fn run_baseline(
    result: Result<screenlasso::baselines::BaselineSolution, BaselineError>,
    w0: &[f64],
) -> Outcome {
    match result {
        Ok(sol) => Outcome {
            status: "ok".into(),
            kkt: sol.kkt.max_violation,
            updates: sol.stats.updates,
            outer_iters: sol.stats.iters,
            screened_per_outer: Vec::new(),
            w: sol.w,
        },
        Err(BaselineError::MaxIters { best, .. }) | Err(BaselineError::Stalled { best, .. }) => {
            Outcome {
                status: "error: no convergence within iteration budget".into(),
                kkt: best.kkt.max_violation,
                updates: best.stats.updates,
                outer_iters: best.stats.iters,
                screened_per_outer: Vec::new(),
                w: best.w,
            }
        }
        Err(e) => Outcome {
            status: format!("error: {e}"),
            kkt: f64::MAX,
            updates: 0,
            outer_iters: 0,
            screened_per_outer: Vec::new(),
            w: w0.to_vec(),
        },
    }
}

/// Solves a single `(lambda, theta)` instance from a zero start and wraps it
/// in the same result structure as a path run.
pub fn run_single(
    prob: &Problem,
    family: PenaltyFamily,
    lambda: f64,
    theta: f64,
    pcfg: &PathConfig,
    mcfg: &MmConfig,
    gist_cfg: &GistConfig,
) -> PathResult {
    let single = PathConfig {
        n_lambdas: 1,
        thetas: vec![theta],
        ..pcfg.clone()
    };
    let mut result = run_path_on_grid(prob, family, &single, mcfg, gist_cfg, |_, _| vec![lambda]);
    result.config.n_lambdas = 1;
    result
}

/// Sweeps the lambda grid once per theta, warm-starting every solve from the
/// previous grid point of the same sweep (sweeps are independent across
/// theta). Solver failures are recorded in the grid point and the sweep
/// continues from the failed solve's best iterate.
pub fn run_path(
    prob: &Problem,
    family: PenaltyFamily,
    pcfg: &PathConfig,
    mcfg: &MmConfig,
    gist_cfg: &GistConfig,
) -> PathResult {
    run_path_on_grid(prob, family, pcfg, mcfg, gist_cfg, |family, theta| {
        lambda_grid(
            lambda_max(family, theta, prob),
            pcfg.n_lambdas,
            pcfg.lambda_decades,
        )
    })
}

fn run_path_on_grid(
    prob: &Problem,
    family: PenaltyFamily,
    pcfg: &PathConfig,
    mcfg: &MmConfig,
    gist_cfg: &GistConfig,
    grid_for: impl Fn(PenaltyFamily, f64) -> Vec<f64>,
) -> PathResult {
    let mm_cfg = |mode: ScreeningMode| MmConfig {
        outer_tol: pcfg.tol,
        screening: mode,
        ..mcfg.clone()
    };
    let d = prob.n_cols();
    let mut points = Vec::with_capacity(pcfg.thetas.len() * pcfg.n_lambdas);
    let mut totals = PathTotals::default();

    for &theta in &pcfg.thetas {
        let grid = grid_for(family, theta);
        let mut warm = vec![0.0; d];
        for (t, &lam) in grid.iter().enumerate() {
            let penalty = match Penalty::new(family, lam, theta) {
                Ok(p) => p,
                Err(e) => {
                    points.push(GridPoint {
                        theta,
                        lambda_index: t,
                        lambda: lam,
                        status: format!("error: {e}"),
                        nnz: 0,
                        objective: 0.0,
                        kkt: 0.0,
                        wall_time_s: 0.0,
                        updates: 0,
                        outer_iters: 0,
                        screened_per_outer: Vec::new(),
                    });
                    totals.failed += 1;
                    continue;
                }
            };

            let start = Instant::now();
            let outcome = match pcfg.solver {
                SolverKind::MmScreen => {
                    run_mm(prob, &penalty, &warm, &mm_cfg(ScreeningMode::Propagate))
                }
                SolverKind::MmGenuine => {
                    run_mm(prob, &penalty, &warm, &mm_cfg(ScreeningMode::InnerOnly))
                }
                SolverKind::MmNoScreen => {
                    run_mm(prob, &penalty, &warm, &mm_cfg(ScreeningMode::Off))
                }
                SolverKind::NcvxCd => run_baseline(
                    solve_ncvxcd(
                        prob,
                        &penalty,
                        &warm,
                        &NcvxCdConfig {
                            tol: pcfg.tol,
                            ..NcvxCdConfig::default()
                        },
                    ),
                    &warm,
                ),
                SolverKind::Gist => run_baseline(
                    solve_gist(prob, &penalty, &warm, gist_cfg, pcfg.tol),
                    &warm,
                ),
            };
            let wall_time_s = start.elapsed().as_secs_f64();

            let ok = outcome.status == "ok";
            let objective = penalty.objective(prob, &outcome.w);
            points.push(GridPoint {
                theta,
                lambda_index: t,
                lambda: lam,
                status: outcome.status,
                nnz: outcome.w.iter().filter(|&&v| v != 0.0).count(),
                objective,
                kkt: outcome.kkt,
                wall_time_s,
                updates: outcome.updates,
                outer_iters: outcome.outer_iters,
                screened_per_outer: outcome.screened_per_outer,
            });
            totals.updates += outcome.updates;
            totals.wall_time_s += wall_time_s;
            if ok {
                totals.solved += 1;
            } else {
                totals.failed += 1;
            }
            warm = outcome.w;
        }
    }

    let radius = match mcfg.radius {
        ScreenRadius::Safe => "safe",
        ScreenRadius::Compact => "compact",
    };
    PathResult {
        config: RunMeta {
            solver: pcfg.solver.id().into(),
            penalty: family.id().into(),
            thetas: pcfg.thetas.clone(),
            n_lambdas: pcfg.n_lambdas,
            lambda_decades: pcfg.lambda_decades,
            tol: pcfg.tol,
            inner_tol: mcfg.inner_tol,
            alpha: mcfg.alpha,
            screen_every_inner: mcfg.inner_screen_every,
            rescreen_every_outer: mcfg.exact_rescreen_every,
            radius: radius.into(),
            dataset: String::new(),
            seed: None,
            normalize: false,
        },
        points,
        totals,
    }
}
