//! Shared problem data: sparse matrices, observed-entry sets, constraint sets and
//! the first-order oracle abstraction.

use std::collections::HashSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, LinearOperator};

/// Default additive feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Row-compressed sparse matrix. Column indices are strictly increasing within
/// each row and no explicit zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from per-row `(column, value)` lists. Zero values are
    /// dropped; columns must be strictly increasing and `< cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for (r, row) in rows.iter().enumerate() {
            let mut last: Option<usize> = None;
            for &(c, v) in row {
                if c >= cols {
                    return Err(Error::IndexOutOfRange {
                        row: r,
                        col: c,
                        rows: rows.len(),
                        cols,
                    });
                }
                if last.is_some_and(|l| c <= l) {
                    return Err(Error::InvalidArgument(format!(
                        "row {r}: column indices not strictly increasing"
                    )));
                }
                if !v.is_finite() {
                    return Err(Error::NonFinite("sparse matrix value"));
                }
                last = Some(c);
                if v != 0.0 {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Ok(SparseMatrix {
            rows: rows.len(),
            cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        let rows: Vec<_> = (0..n).map(|i| vec![(i, 1.0)]).collect();
        SparseMatrix::from_rows(n, &rows).expect("identity is valid")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Raw `(indptr, indices, values)` arrays.
    pub fn parts(&self) -> (&[usize], &[usize], &[f64]) {
        (&self.indptr, &self.indices, &self.values)
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[range.clone()], &self.values[range])
    }

    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter().zip(val).map(|(&j, v)| v * x[j]).sum()
    }

    /// Returns a copy with a wider column count (LIBSVM files carry no header).
    pub fn with_cols(mut self, cols: usize) -> Result<Self> {
        if cols < self.cols {
            return Err(Error::InvalidArgument(format!(
                "cannot shrink matrix from {} to {cols} columns",
                self.cols
            )));
        }
        self.cols = cols;
        Ok(self)
    }

    pub fn select_rows(&self, rows: &[usize]) -> SparseMatrix {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for &r in rows {
            let (idx, val) = self.row(r);
            indices.extend_from_slice(idx);
            values.extend_from_slice(val);
            indptr.push(indices.len());
        }
        SparseMatrix {
            rows: rows.len(),
            cols: self.cols,
            indptr,
            indices,
            values,
        }
    }

    /// Scales every column by the reciprocal of its largest absolute value.
    pub fn normalize_max_abs(&mut self) {
        let mut scale = vec![0.0f64; self.cols];
        for (&j, v) in self.indices.iter().zip(&self.values) {
            scale[j] = scale[j].max(v.abs());
        }
        for (&j, v) in self.indices.iter().zip(self.values.iter_mut()) {
            *v /= scale[j];
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.rows)
            .map(|i| {
                let (idx, val) = self.row(i);
                idx.iter().copied().zip(val.iter().copied()).collect()
            })
            .collect()
    }
}

impl LinearOperator for SparseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row_dot(i, x);
        }
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, yi) in y.iter().enumerate() {
            let (idx, val) = self.row(i);
            for (&j, v) in idx.iter().zip(val) {
                out[j] += v * yi;
            }
        }
    }
}

/// A partially observed `rows x cols` matrix as `(row, col, value)` triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedEntries {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl ObservedEntries {
    pub fn new(shape: (usize, usize), entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        let (rows, cols) = shape;
        let mut seen = HashSet::with_capacity(entries.len());
        for &(i, j, v) in &entries {
            if i >= rows || j >= cols {
                return Err(Error::IndexOutOfRange {
                    row: i,
                    col: j,
                    rows,
                    cols,
                });
            }
            if !seen.insert((i, j)) {
                return Err(Error::DuplicateEntry { row: i, col: j });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("observed entry"));
            }
        }
        Ok(ObservedEntries {
            rows,
            cols,
            entries,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.2).collect()
    }

    /// Same sparsity pattern with new values (in entry order).
    pub fn with_values(&self, values: &[f64]) -> Result<ObservedEntries> {
        if values.len() != self.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: self.entries.len(),
                found: values.len(),
            });
        }
        Ok(ObservedEntries {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(values)
                .map(|(&(i, j, _), &v)| (i, j, v))
                .collect(),
        })
    }

    pub fn density(&self) -> f64 {
        self.entries.len() as f64 / (self.rows as f64 * self.cols as f64)
    }

    /// Dense row-major copy with zeros outside the observed set.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for &(i, j, v) in &self.entries {
            out[i * self.cols + j] = v;
        }
        out
    }
}

/// Observed entries viewed as a sparse matrix (zero off the pattern).
pub(crate) struct PatternOperator<'a> {
    pub shape: (usize, usize),
    pub pattern: &'a [(usize, usize, f64)],
    pub values: &'a [f64],
}

impl LinearOperator for PatternOperator<'_> {
    fn nrows(&self) -> usize {
        self.shape.0
    }

    fn ncols(&self) -> usize {
        self.shape.1
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&(i, j, _), v) in self.pattern.iter().zip(self.values) {
            out[i] += v * x[j];
        }
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&(i, j, _), v) in self.pattern.iter().zip(self.values) {
            out[j] += v * y[i];
        }
    }
}

/// The feasible sets supported by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConstraintSet {
    L2Ball { radius: f64 },
    L1Ball { radius: f64 },
    /// `{x >= 0, sum(x) = mass}`
    Simplex { mass: f64 },
    /// Convex hull of `n`-sparse vectors with Euclidean norm at most `radius`.
    NSupportBall { sparsity: usize, radius: f64 },
    /// Nuclear-norm ball over `rows x cols` matrices (row-major when flattened).
    NuclearBall {
        rows: usize,
        cols: usize,
        radius: f64,
    },
}

fn check_radius(r: f64) -> Result<f64> {
    if r.is_finite() && r > 0.0 {
        Ok(r)
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {r}")))
    }
}

impl ConstraintSet {
    pub fn l2(radius: f64) -> Result<Self> {
        Ok(ConstraintSet::L2Ball {
            radius: check_radius(radius)?,
        })
    }

    pub fn l1(radius: f64) -> Result<Self> {
        Ok(ConstraintSet::L1Ball {
            radius: check_radius(radius)?,
        })
    }

    pub fn simplex(mass: f64) -> Result<Self> {
        Ok(ConstraintSet::Simplex {
            mass: check_radius(mass)?,
        })
    }

    pub fn n_support(sparsity: usize, radius: f64) -> Result<Self> {
        if sparsity == 0 {
            return Err(Error::InvalidArgument("n-support sparsity must be >= 1".into()));
        }
        Ok(ConstraintSet::NSupportBall {
            sparsity,
            radius: check_radius(radius)?,
        })
    }

    pub fn nuclear(rows: usize, cols: usize, radius: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("nuclear ball needs a non-empty shape".into()));
        }
        Ok(ConstraintSet::NuclearBall {
            rows,
            cols,
            radius: check_radius(radius)?,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConstraintSet::L2Ball { .. } => "l2-ball",
            ConstraintSet::L1Ball { .. } => "l1-ball",
            ConstraintSet::Simplex { .. } => "simplex",
            ConstraintSet::NSupportBall { .. } => "n-support-ball",
            ConstraintSet::NuclearBall { .. } => "nuclear-ball",
        }
    }

    pub fn radius(&self) -> f64 {
        match *self {
            ConstraintSet::L2Ball { radius }
            | ConstraintSet::L1Ball { radius }
            | ConstraintSet::NSupportBall { radius, .. }
            | ConstraintSet::NuclearBall { radius, .. } => radius,
            ConstraintSet::Simplex { mass } => mass,
        }
    }

    /// Euclidean (Frobenius for the nuclear ball) diameter.
    pub fn diameter(&self) -> f64 {
        match *self {
            ConstraintSet::Simplex { mass } => mass * std::f64::consts::SQRT_2,
            _ => 2.0 * self.radius(),
        }
    }

    /// Checks that a point of dimension `dim` is compatible with this set.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match *self {
            ConstraintSet::NSupportBall { sparsity, .. } if sparsity > dim => {
                Err(Error::InvalidArgument(format!(
                    "n-support sparsity {sparsity} exceeds dimension {dim}"
                )))
            }
            ConstraintSet::NuclearBall { rows, cols, .. } if rows * cols != dim => {
                Err(Error::DimensionMismatch {
                    expected: rows * cols,
                    found: dim,
                })
            }
            _ if dim == 0 => Err(Error::InvalidArgument("empty point".into())),
            _ => Ok(()),
        }
    }

    /// Membership test with additive tolerance. Nuclear-ball points are
    /// row-major flattened matrices.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(x.len())?;
        if !linalg::all_finite(x) {
            return Ok(false);
        }
        let r = self.radius();
        Ok(match *self {
            ConstraintSet::L2Ball { .. } => linalg::norm2(x) <= r + tol,
            ConstraintSet::L1Ball { .. } => linalg::norm1(x) <= r + tol,
            ConstraintSet::Simplex { mass } => {
                x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - mass).abs() <= tol
            }
            ConstraintSet::NSupportBall { sparsity, .. } => n_support_norm(x, sparsity) <= r + tol,
            ConstraintSet::NuclearBall { rows, cols, .. } => {
                nuclear_norm(rows, cols, x) <= r + tol
            }
        })
    }

    /// Default starting point: the origin, or `mass * e_1` for the simplex.
    pub fn default_start(&self, dim: usize) -> Vec<f64> {
        let mut x = vec![0.0; dim];
        if let ConstraintSet::Simplex { mass } = *self {
            x[0] = mass;
        }
        x
    }
}

/// The `n`-support norm, from the sorted-magnitude closed form.
pub fn n_support_norm(x: &[f64], n: usize) -> f64 {
    let d = x.len();
    assert!(n >= 1 && n <= d, "n-support norm needs 1 <= n <= d");
    let mut z: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    z.sort_by(|a, b| b.total_cmp(a));
    // z[0] >= z[1] >= ... ; with 1-based z_i = z[i-1] and z_0 = +inf, find
    // r in 0..n with z_{n-r-1} > tail / (r+1) >= z_{n-r}, tail = sum_{i >= n-r} z_i.
    let mut suffix = vec![0.0; d + 1];
    for i in (0..d).rev() {
        suffix[i] = suffix[i + 1] + z[i];
    }
    let eval = |r: usize| {
        let head_len = n - r - 1;
        let head: f64 = z[..head_len].iter().map(|v| v * v).sum();
        let tail = suffix[head_len];
        (head + tail * tail / (r as f64 + 1.0)).sqrt()
    };
    for r in 0..n {
        let head_len = n - r - 1;
        let avg = suffix[head_len] / (r as f64 + 1.0);
        let upper = if head_len == 0 {
            f64::INFINITY
        } else {
            z[head_len - 1]
        };
        if upper > avg && avg >= z[head_len] {
            return eval(r);
        }
    }
    // only reachable through rounding; r = n-1 is the l1-like end
    eval(n - 1)
}

/// Sum of singular values of a row-major `rows x cols` matrix.
pub fn nuclear_norm(rows: usize, cols: usize, x: &[f64]) -> f64 {
    let m = DMatrix::from_row_slice(rows, cols, x);
    m.singular_values().iter().sum()
}

/// First-order oracle over dense vectors.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    /// Value and gradient at `x`.
    fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;

    /// A known Lipschitz constant of the gradient, if the objective has one.
    fn lipschitz(&self) -> Option<f64> {
        None
    }
}
