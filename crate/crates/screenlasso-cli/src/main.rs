use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use screenlasso::mm::MmConfig;
use screenlasso::penalty::PenaltyFamily;
use screenlasso::problem::Problem;
use screenlasso::pwl::ScreenRadius;
use screenlasso_cli::data::{generate_toy, load_dense_csv, load_libsvm, write_dense_csv, ToyConfig};
use screenlasso_cli::path::{run_path, run_single, PathConfig, PathResult, SolverKind};
use screenlasso_cli::report::{emit_results, render_csv, render_json, OutputFormat};

#[derive(Parser)]
#[command(
    name = "screenlasso",
    version,
    about = "Sparse least-squares regression with non-convex penalties, solved by \
             majorization-minimization with duality-gap safe screening"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single (lambda, theta) instance
    Solve(SolveArgs),
    /// Compute a regularization path over a lambda grid for each theta
    Path(PathArgs),
    /// Generate a synthetic instance and write it as a combined CSV
    GenToy(GenToyArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Dense dataset: comma-separated, no header, last column is the target
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,
    /// Sparse dataset: `<label> <index>:<value> ...` lines, 1-based indices
    #[arg(long, value_name = "FILE")]
    libsvm: Option<PathBuf>,
    /// Generate a synthetic instance in memory instead of loading a file
    #[arg(long)]
    toy: bool,
    /// Toy generator: number of samples
    #[arg(long, default_value_t = 50)]
    toy_n: usize,
    /// Toy generator: number of features
    #[arg(long, default_value_t = 100)]
    toy_d: usize,
    /// Toy generator: number of active features
    #[arg(long, default_value_t = 5)]
    toy_p: usize,
    /// Toy generator: noise standard deviation
    #[arg(long, default_value_t = 2.0)]
    toy_sigma: f64,
    /// Seed for the toy generator
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rescale every column to unit norm after loading
    #[arg(long)]
    normalize: bool,
}

impl DataArgs {
    fn load(&self) -> Result<(Problem, String)> {
        let sources = usize::from(self.data.is_some())
            + usize::from(self.libsvm.is_some())
            + usize::from(self.toy);
        if sources != 1 {
            bail!("pick exactly one data source: --data <FILE>, --libsvm <FILE> or --toy");
        }
        let (prob, description) = if let Some(path) = &self.data {
            (
                load_dense_csv(path).context("loading dense data")?,
                path.display().to_string(),
            )
        } else if let Some(path) = &self.libsvm {
            (
                load_libsvm(path).context("loading sparse data")?,
                path.display().to_string(),
            )
        } else {
            let cfg = ToyConfig {
                n: self.toy_n,
                d: self.toy_d,
                p: self.toy_p,
                sigma: self.toy_sigma,
                seed: self.seed,
            };
            let (prob, _) = generate_toy(&cfg).context("generating toy data")?;
            (
                prob,
                format!(
                    "toy(n={}, d={}, p={}, sigma={}, seed={})",
                    cfg.n, cfg.d, cfg.p, cfg.sigma, cfg.seed
                ),
            )
        };
        Ok(if self.normalize {
            (prob.normalized(), description)
        } else {
            (prob, description)
        })
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Penalty family: logsum, mcp or scad
    #[arg(long, default_value = "logsum")]
    penalty: PenaltyFamily,
    /// Proximal strength of the outer iterations
    #[arg(long, default_value_t = 1e9)]
    alpha: f64,
    /// Stopping tolerance on the first-order conditions
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Duality-gap tolerance of the inner solves
    #[arg(long, default_value_t = 1e-4)]
    inner_tol: f64,
    /// Epochs between screening passes inside each inner solve
    #[arg(long, default_value_t = 5)]
    screen_every_inner: usize,
    /// Outer iterations between exact screening-score refreshes
    #[arg(long, default_value_t = 10)]
    rescreen_every_outer: usize,
    /// Cap on outer iterations per solve
    #[arg(long, default_value_t = 1000)]
    max_outer: usize,
    /// Solver: mm-screen, mm-genuine, mm-noscreen, ncvxcd or gist
    #[arg(long, default_value = "mm-screen")]
    solver: SolverKind,
    /// Drop cross-iteration screening propagation (inner screening stays)
    #[arg(long)]
    no_propagation: bool,
    /// Disable screening everywhere
    #[arg(long)]
    no_screen: bool,
    /// Screen with the compact radius sqrt(2G)(||x_j|| + 1/alpha) instead of
    /// the provably safe sqrt(2G)||x_j|| + sqrt(2G/alpha)
    #[arg(long)]
    paper_radius: bool,
}

impl SolverArgs {
    fn solver_kind(&self) -> SolverKind {
        let mut kind = self.solver;
        if self.no_propagation && kind == SolverKind::MmScreen {
            kind = SolverKind::MmGenuine;
        }
        if self.no_screen && matches!(kind, SolverKind::MmScreen | SolverKind::MmGenuine) {
            kind = SolverKind::MmNoScreen;
        }
        kind
    }

    fn mm_config(&self) -> MmConfig {
        MmConfig {
            alpha: self.alpha,
            outer_tol: self.tol,
            inner_tol: self.inner_tol,
            exact_rescreen_every: self.rescreen_every_outer,
            inner_screen_every: self.screen_every_inner,
            max_outer_iters: self.max_outer,
            radius: if self.paper_radius {
                ScreenRadius::Compact
            } else {
                ScreenRadius::Safe
            },
            ..MmConfig::default()
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write results here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Output format: json or csv
    #[arg(long, default_value = "json")]
    format: OutputFormat,
}

impl OutputArgs {
    fn emit(&self, result: &PathResult) -> Result<()> {
        match &self.out {
            Some(path) => emit_results(result, self.format, path)?,
            None => {
                let body = match self.format {
                    OutputFormat::Json => render_json(result),
                    OutputFormat::Csv => render_csv(result),
                };
                println!("{body}");
            }
        }
        Ok(())
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Regularization strength
    #[arg(long)]
    lambda: f64,
    /// Penalty shape parameter
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PathArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Number of lambda values per theta
    #[arg(long, default_value_t = 50)]
    n_lambdas: usize,
    /// Orders of magnitude the grid descends below lambda_max
    #[arg(long, default_value_t = 3.0)]
    decades: f64,
    /// Comma-separated list of theta values
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.1, 1.0])]
    thetas: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct GenToyArgs {
    /// Number of samples
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Number of features
    #[arg(long, default_value_t = 100)]
    d: usize,
    /// Number of active features
    #[arg(long, default_value_t = 5)]
    p: usize,
    /// Noise standard deviation
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination CSV (features plus target column)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn finish(result: &PathResult, output: &OutputArgs) -> Result<ExitCode> {
    output.emit(result)?;
    if result.totals.failed > 0 {
        eprintln!(
            "{} of {} grid points failed",
            result.totals.failed,
            result.points.len()
        );
        Ok(ExitCode::FAILURE)
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(args) => {
            let (prob, dataset) = args.data.load()?;
            let pcfg = PathConfig {
                tol: args.solver.tol,
                solver: args.solver.solver_kind(),
                ..PathConfig::default()
            };
            let mut result = run_single(
                &prob,
                args.solver.penalty,
                args.lambda,
                args.theta,
                &pcfg,
                &args.solver.mm_config(),
                &Default::default(),
            );
            result.config.dataset = dataset;
            result.config.seed = args.data.toy.then_some(args.data.seed);
            result.config.normalize = args.data.normalize;
            finish(&result, &args.output)
        }
        Command::Path(args) => {
            let (prob, dataset) = args.data.load()?;
            let pcfg = PathConfig {
                n_lambdas: args.n_lambdas,
                lambda_decades: args.decades,
                thetas: args.thetas.clone(),
                tol: args.solver.tol,
                solver: args.solver.solver_kind(),
            };
            let mut result = run_path(
                &prob,
                args.solver.penalty,
                &pcfg,
                &args.solver.mm_config(),
                &Default::default(),
            );
            result.config.dataset = dataset;
            result.config.seed = args.data.toy.then_some(args.data.seed);
            result.config.normalize = args.data.normalize;
            finish(&result, &args.output)
        }
        Command::GenToy(args) => {
            let cfg = ToyConfig {
                n: args.n,
                d: args.d,
                p: args.p,
                sigma: args.sigma,
                seed: args.seed,
            };
            let (prob, w_true) = generate_toy(&cfg)?;
            write_dense_csv(&args.out, &prob)?;
            let nnz = w_true.iter().filter(|&&v| v != 0.0).count();
            eprintln!(
                "wrote {} ({} x {}, {} active coefficients)",
                args.out.display(),
                prob.n_rows(),
                prob.n_cols(),
                nnz
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
