//! Dataset ingestion and the synthetic toy-problem generator.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;
use screenlasso::problem::{CscMatrix, Problem};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: no data rows")]
    Empty { path: PathBuf },
    #[error("invalid problem: {0}")]
    Problem(#[from] screenlasso::problem::ProblemError),
    #[error("invalid generator config: {0}")]
    Config(String),
}

/// Synthetic regression instance description.
#[derive(Debug, Clone)]
pub struct ToyConfig {
    pub n: usize,
    pub d: usize,
    /// Number of active (nonzero) coefficients; zero gives a pure-noise target.
    pub p: usize,
    /// Noise standard deviation.
    pub sigma: f64,
    pub seed: u64,
}

/// Standard normals from a ChaCha20 stream via the Box-Muller transform,
/// consuming two uniforms per pair. Both the generator and the transform are
/// fixed here so traces reproduce across platforms.
struct NormalSource {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl NormalSource {
    fn new(seed: u64) -> Self {
        NormalSource {
            rng: ChaCha20Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    fn next(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let u1: f64 = 1.0 - self.rng.gen::<f64>(); // (0, 1], keeps ln finite
        let u2: f64 = self.rng.gen();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    fn pick(&mut self, upper: usize) -> usize {
        self.rng.gen_range(0..upper)
    }
}

/// Generates `y = X w* + e` with `X` entries i.i.d. Gaussian of variance 4
/// (drawn column by column), `p` active positions chosen uniformly without
/// replacement, active values standard normal shifted by `+/- 0.1` according
/// to their sign, and noise of standard deviation `sigma`. Identical config
/// and seed reproduce the instance exactly.
pub fn generate_toy(cfg: &ToyConfig) -> Result<(Problem, Vec<f64>), DataError> {
    if cfg.n == 0 || cfg.d == 0 {
        return Err(DataError::Config("n and d must be positive".into()));
    }
    if cfg.p > cfg.d {
        return Err(DataError::Config(format!(
            "p = {} active variables but only d = {} columns",
            cfg.p, cfg.d
        )));
    }
    if cfg.sigma.is_nan() || cfg.sigma < 0.0 {
        return Err(DataError::Config("sigma must be non-negative".into()));
    }

    let mut source = NormalSource::new(cfg.seed);
    let mut data = vec![0.0; cfg.n * cfg.d];
    for v in data.iter_mut() {
        *v = 2.0 * source.next();
    }

    // partial Fisher-Yates over the column indices
    let mut order: Vec<usize> = (0..cfg.d).collect();
    for k in 0..cfg.p {
        let swap = k + source.pick(cfg.d - k);
        order.swap(k, swap);
    }
    let mut w_true = vec![0.0; cfg.d];
    for &j in &order[..cfg.p] {
        let g = source.next();
        w_true[j] = if g >= 0.0 { g + 0.1 } else { g - 0.1 };
    }

    let mut y = vec![0.0; cfg.n];
    for (j, &wj) in w_true.iter().enumerate() {
        if wj != 0.0 {
            for i in 0..cfg.n {
                y[i] += wj * data[j * cfg.n + i];
            }
        }
    }
    if cfg.sigma > 0.0 {
        for yi in y.iter_mut() {
            *yi += cfg.sigma * source.next();
        }
    }

    let prob = Problem::dense(cfg.n, cfg.d, data, y)?;
    Ok((prob, w_true))
}

fn read_to_string(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a dense problem from a comma-separated file with no header where
/// the last column is the target, so a file with `d + 1` columns yields an
/// `n x d` design matrix. Rows are kept in file order.
pub fn load_dense_csv(path: &Path) -> Result<Problem, DataError> {
    let text = read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut y: Vec<f64> = Vec::new();
    let mut width: Option<usize> = None;
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut values = Vec::new();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| DataError::Parse {
                path: path.to_path_buf(),
                line: line_no + 1,
                msg: format!("not a number: {:?}", field.trim()),
            })?;
            values.push(v);
        }
        if values.len() < 2 {
            return Err(DataError::Parse {
                path: path.to_path_buf(),
                line: line_no + 1,
                msg: "need at least one feature column and the target".into(),
            });
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(DataError::Parse {
                    path: path.to_path_buf(),
                    line: line_no + 1,
                    msg: format!("expected {w} columns, found {}", values.len()),
                });
            }
            _ => {}
        }
        y.push(values.pop().unwrap());
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(DataError::Empty {
            path: path.to_path_buf(),
        });
    }
    Ok(Problem::from_rows(&rows, y)?)
}

/// Writes the matrix and target back out in the combined CSV layout read by
/// [`load_dense_csv`]. Floats are printed in shortest round-trip form, so a
/// write/load cycle reproduces the values bit for bit.
pub fn write_dense_csv(path: &Path, prob: &Problem) -> Result<(), DataError> {
    let mut out = String::new();
    for i in 0..prob.n_rows() {
        for v in prob.row(i) {
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(out, "{}", prob.y()[i]);
    }
    fs::write(path, out).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a sparse problem in svmlight form: `<label> <index>:<value> ...`
/// per line, indices 1-based in the file and mapped to 0-based columns.
/// The column count is inferred from the largest index. Duplicate indices
/// within one row are rejected.
pub fn load_libsvm(path: &Path) -> Result<Problem, DataError> {
    let text = read_to_string(path)?;
    let parse_err = |line: usize, msg: String| DataError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut y: Vec<f64> = Vec::new();
    let mut row_entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut d = 0usize;
    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label: f64 = tokens
            .next()
            .unwrap()
            .parse()
            .map_err(|_| parse_err(line_no, "label is not a number".into()))?;
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for token in tokens {
            let (idx, val) = token
                .split_once(':')
                .ok_or_else(|| parse_err(line_no, format!("expected index:value, got {token:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad feature index {idx:?}")))?;
            if idx == 0 {
                return Err(parse_err(line_no, "feature indices are 1-based".into()));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad feature value {val:?}")))?;
            entries.push((idx - 1, val));
        }
        entries.sort_unstable_by_key(|&(j, _)| j);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(parse_err(line_no, "duplicate feature index".into()));
        }
        if let Some(&(max_j, _)) = entries.last() {
            d = d.max(max_j + 1);
        }
        y.push(label);
        row_entries.push(entries);
    }
    if y.is_empty() {
        return Err(DataError::Empty {
            path: path.to_path_buf(),
        });
    }
    if d == 0 {
        return Err(DataError::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: "no feature entries in the whole file".into(),
        });
    }

    // column-compressed assembly; rows were visited in order, so row indices
    // within each column are already increasing
    let mut per_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d];
    for (i, entries) in row_entries.iter().enumerate() {
        for &(j, v) in entries {
            per_col[j].push((i, v));
        }
    }
    let mut col_ptr = Vec::with_capacity(d + 1);
    let mut row_idx = Vec::new();
    let mut values = Vec::new();
    col_ptr.push(0);
    for col in per_col {
        for (i, v) in col {
            row_idx.push(i);
            values.push(v);
        }
        col_ptr.push(row_idx.len());
    }
    let rows = y.len();
    let matrix = CscMatrix::new(rows, d, col_ptr, row_idx, values)?;
    Ok(Problem::sparse(matrix, y)?)
}
