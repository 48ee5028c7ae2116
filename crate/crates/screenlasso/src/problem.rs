//! Design matrix and target vector, with cached column norms.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProblemError {
    #[error("problem must have at least one row and one column (got {rows}x{cols})")]
    Empty { rows: usize, cols: usize },
    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: &'static str },
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },
    #[error("invalid sparse structure: {what}")]
    InvalidSparse { what: &'static str },
}

/// Column-compressed sparse matrix.
#[derive(Debug, Clone)]
pub struct CscMatrix {
    rows: usize,
    cols: usize,
    /// `col_ptr[j]..col_ptr[j+1]` indexes the entries of column `j`.
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, ProblemError> {
        if col_ptr.len() != cols + 1 || *col_ptr.last().unwrap_or(&1) != values.len() {
            return Err(ProblemError::InvalidSparse {
                what: "column pointer array does not match entry count",
            });
        }
        if row_idx.len() != values.len() {
            return Err(ProblemError::InvalidSparse {
                what: "row index and value arrays differ in length",
            });
        }
        for j in 0..cols {
            if col_ptr[j] > col_ptr[j + 1] {
                return Err(ProblemError::InvalidSparse {
                    what: "column pointers must be non-decreasing",
                });
            }
            let rng = col_ptr[j]..col_ptr[j + 1];
            for k in rng.clone() {
                if row_idx[k] >= rows {
                    return Err(ProblemError::InvalidSparse {
                        what: "row index out of bounds",
                    });
                }
                if k > rng.start && row_idx[k] <= row_idx[k - 1] {
                    return Err(ProblemError::InvalidSparse {
                        what: "row indices within a column must be strictly increasing",
                    });
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFinite { what: "matrix entry" });
        }
        Ok(CscMatrix {
            rows,
            cols,
            col_ptr,
            row_idx,
            values,
        })
    }

    fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let rng = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[rng.clone()], &self.values[rng])
    }
}

#[derive(Debug, Clone)]
enum Columns {
    /// Column-major dense storage: column `j` is `data[j*rows..(j+1)*rows]`.
    Dense { data: Vec<f64>, rows: usize },
    Sparse(CscMatrix),
}

/// A least-squares instance: design matrix `X` (dense or column-sparse),
/// target `y`, and cached per-column Euclidean norms.
#[derive(Debug, Clone)]
pub struct Problem {
    x: Columns,
    y: Vec<f64>,
    cols: usize,
    col_norms_sq: Vec<f64>,
    col_norms: Vec<f64>,
}

impl Problem {
    /// Builds a dense problem from column-major data.
    pub fn dense(rows: usize, cols: usize, data: Vec<f64>, y: Vec<f64>) -> Result<Self, ProblemError> {
        if rows == 0 || cols == 0 {
            return Err(ProblemError::Empty { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(ProblemError::DimensionMismatch {
                what: "matrix buffer length != rows * cols",
            });
        }
        if y.len() != rows {
            return Err(ProblemError::DimensionMismatch {
                what: "target length != number of rows",
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFinite { what: "matrix entry" });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFinite { what: "target entry" });
        }
        Ok(Self::with_norms(Columns::Dense { data, rows }, y, cols))
    }

    /// Builds a dense problem from row slices (convenience for loaders and tests).
    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self, ProblemError> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(ProblemError::DimensionMismatch {
                what: "ragged rows",
            });
        }
        let mut data = vec![0.0; n * d];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                data[j * n + i] = *v;
            }
        }
        Self::dense(n, d, data, y)
    }

    pub fn sparse(x: CscMatrix, y: Vec<f64>) -> Result<Self, ProblemError> {
        if x.rows == 0 || x.cols == 0 {
            return Err(ProblemError::Empty {
                rows: x.rows,
                cols: x.cols,
            });
        }
        if y.len() != x.rows {
            return Err(ProblemError::DimensionMismatch {
                what: "target length != number of rows",
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFinite { what: "target entry" });
        }
        let cols = x.cols;
        Ok(Self::with_norms(Columns::Sparse(x), y, cols))
    }

    fn with_norms(x: Columns, y: Vec<f64>, cols: usize) -> Self {
        let mut p = Problem {
            x,
            y,
            cols,
            col_norms_sq: Vec::new(),
            col_norms: Vec::new(),
        };
        p.col_norms_sq = (0..cols).map(|j| p.compute_col_norm_sq(j)).collect();
        p.col_norms = p.col_norms_sq.iter().map(|&v| math::sqrt(v)).collect();
        p
    }

    fn compute_col_norm_sq(&self, j: usize) -> f64 {
        match &self.x {
            Columns::Dense { data, rows } => math::norm_sq(&data[j * rows..(j + 1) * rows]),
            Columns::Sparse(m) => math::norm_sq(m.col(j).1),
        }
    }

    pub fn n_rows(&self) -> usize {
        match &self.x {
            Columns::Dense { rows, .. } => *rows,
            Columns::Sparse(m) => m.rows,
        }
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn col_norm_sq(&self, j: usize) -> f64 {
        self.col_norms_sq[j]
    }

    pub fn col_norm(&self, j: usize) -> f64 {
        self.col_norms[j]
    }

    pub fn col_norms_sq(&self) -> &[f64] {
        &self.col_norms_sq
    }

    pub fn col_norms(&self) -> &[f64] {
        &self.col_norms
    }

    /// `x_j . v` for a length-`n` vector `v`.
    pub fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.n_rows());
        match &self.x {
            Columns::Dense { data, rows } => math::dot(&data[j * rows..(j + 1) * rows], v),
            Columns::Sparse(m) => {
                let (idx, vals) = m.col(j);
                idx.iter().zip(vals).map(|(&i, &x)| x * v[i]).sum()
            }
        }
    }

    /// `out += a * x_j`, touching only the stored entries of sparse columns.
    pub fn col_axpy(&self, j: usize, a: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n_rows());
        if a == 0.0 {
            return;
        }
        match &self.x {
            Columns::Dense { data, rows } => {
                for (o, x) in out.iter_mut().zip(&data[j * rows..(j + 1) * rows]) {
                    *o += a * x;
                }
            }
            Columns::Sparse(m) => {
                let (idx, vals) = m.col(j);
                for (&i, &x) in idx.iter().zip(vals) {
                    out[i] += a * x;
                }
            }
        }
    }

    /// `X^T v` as a dense length-`d` vector.
    pub fn xt_dot(&self, v: &[f64]) -> Vec<f64> {
        (0..self.cols).map(|j| self.col_dot(j, v)).collect()
    }

    /// `y - X w`, accumulated over the nonzero entries of `w`.
    pub fn residual(&self, w: &[f64]) -> Vec<f64> {
        debug_assert_eq!(w.len(), self.cols);
        let mut r = self.y.clone();
        for (j, &wj) in w.iter().enumerate() {
            if wj != 0.0 {
                self.col_axpy(j, -wj, &mut r);
            }
        }
        r
    }

    /// `X^T y`; the correlations that determine the critical regularization level.
    pub fn xty(&self) -> Vec<f64> {
        self.xt_dot(&self.y)
    }

    /// Rescales every non-zero column to unit Euclidean norm.
    pub fn normalized(mut self) -> Self {
        let scales: Vec<f64> = self
            .col_norms
            .iter()
            .map(|&nrm| if nrm > 0.0 { 1.0 / nrm } else { 1.0 })
            .collect();
        match &mut self.x {
            Columns::Dense { data, rows } => {
                for j in 0..self.cols {
                    for v in &mut data[j * *rows..(j + 1) * *rows] {
                        *v *= scales[j];
                    }
                }
            }
            Columns::Sparse(m) => {
                for j in 0..self.cols {
                    for k in m.col_ptr[j]..m.col_ptr[j + 1] {
                        m.values[k] *= scales[j];
                    }
                }
            }
        }
        let y = core::mem::take(&mut self.y);
        let cols = self.cols;
        Self::with_norms(self.x, y, cols)
    }

    /// Recomputes the cached norms and checks them against the stored values
    /// (relative tolerance `1e-12`). Used by tests to guard cache integrity.
    pub fn validate(&self) -> Result<(), ProblemError> {
        for j in 0..self.cols {
            let fresh = self.compute_col_norm_sq(j);
            let cached = self.col_norms_sq[j];
            if math::abs(fresh - cached) > 1e-12 * (1.0 + math::abs(fresh)) {
                return Err(ProblemError::DimensionMismatch {
                    what: "cached column norm disagrees with recomputation",
                });
            }
        }
        Ok(())
    }

    /// Dense row-major copy of the matrix; loaders use it to echo data back out.
    pub fn row(&self, i: usize) -> Vec<f64> {
        match &self.x {
            Columns::Dense { data, rows } => (0..self.cols).map(|j| data[j * rows + i]).collect(),
            Columns::Sparse(m) => {
                let mut out = vec![0.0; self.cols];
                for (j, o) in out.iter_mut().enumerate() {
                    let (idx, vals) = m.col(j);
                    if let Ok(k) = idx.binary_search(&i) {
                        *o = vals[k];
                    }
                }
                out
            }
        }
    }
}
