//! Dense decompositions and proximal operators.
//!
//! The building blocks everything else stands on: skinny SVD with a
//! relative numerical-rank rule, singular value thresholding (the proximal
//! operator of the nuclear norm), column shrinkage (the proximal operator of
//! the (2,1)-norm), and the shape interaction matrix.
//!
//! Matrices are stored dense; the problem sizes in scope (a few hundred
//! samples) do not warrant sparse structures.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};

/// Default relative tolerance for numerical rank on clean-data paths.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// A dense m×n real data matrix whose columns are samples.
///
/// Construction validates that every entry is finite and that both
/// dimensions are at least 1; all operations may then assume a well-formed
/// matrix. Values are immutable after construction and safe to share across
/// threads.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Array2<f64>,
}

impl DataMatrix {
    /// Wraps a dense array, rejecting empty shapes and non-finite entries.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix must have at least one row and one column, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(
                "matrix contains non-finite entries".into(),
            ));
        }
        Ok(Self { values })
    }

    /// Ambient dimension (number of rows).
    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    /// Number of samples (columns).
    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    /// Borrows the underlying array.
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Consumes the wrapper, returning the underlying array.
    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }
}

/// Skinny SVD triple truncated to numerical rank.
///
/// `u` is m×r with orthonormal columns, `sigma` holds the `r` retained
/// singular values in strictly decreasing order (all positive), and `v` is
/// n×r with orthonormal columns, so that `u · diag(sigma) · vᵀ`
/// reconstructs the input up to the rank-truncation residual.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: Array2<f64>,
    pub sigma: Array1<f64>,
    pub v: Array2<f64>,
    /// Numerical rank: the number of singular values above
    /// `rank_tol · sigma_max`.
    pub rank: usize,
}

/// Copies an `ndarray` matrix into the decomposition backend's layout.
pub(crate) fn to_faer(a: &Array2<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Copies a backend matrix back to `ndarray`.
pub(crate) fn from_faer(m: faer::MatRef<'_, f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Full thin SVD of `a`, with singular triplets sorted by decreasing
/// singular value. Returns (U, sigma, V) where U is m×p, sigma length p,
/// V is n×p, p = min(m, n).
pub fn thin_svd(a: &Array2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    let svd = to_faer(a)
        .thin_svd()
        .map_err(|e| Error::DecompositionFailure(format!("SVD computation failed: {e:?}")))?;
    let u = svd.U();
    let v = svd.V();
    let s = svd.S();

    // The backend sorts, but the ordering is load-bearing everywhere below,
    // so enforce it explicitly.
    let p = s.dim();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).expect("finite singular values"));

    let m = u.nrows();
    let n = v.nrows();
    let mut u_s = Array2::zeros((m, p));
    let mut v_s = Array2::zeros((n, p));
    let mut sig = Array1::zeros(p);
    for (dst, &src) in order.iter().enumerate() {
        sig[dst] = s[src];
        for i in 0..m {
            u_s[(i, dst)] = u[(i, src)];
        }
        for i in 0..n {
            v_s[(i, dst)] = v[(i, src)];
        }
    }
    Ok((u_s, sig, v_s))
}

/// Skinny SVD of `a` truncated at numerical rank.
///
/// The rank is the count of singular values strictly greater than
/// `rank_tol · sigma_max`. The all-zero matrix yields rank 0 with empty
/// factors.
pub fn skinny_svd(a: &DataMatrix, rank_tol: f64) -> Result<SvdFactors> {
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(Error::InvalidInput(format!(
            "rank_tol must lie in (0, 1), got {rank_tol}"
        )));
    }
    let (u, sigma, v) = thin_svd(a.values())?;
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    let rank = if sigma_max == 0.0 {
        0
    } else {
        sigma
            .iter()
            .take_while(|&&s| s > rank_tol * sigma_max)
            .count()
    };
    Ok(SvdFactors {
        u: u.slice(ndarray::s![.., ..rank]).to_owned(),
        sigma: sigma.slice(ndarray::s![..rank]).to_owned(),
        v: v.slice(ndarray::s![.., ..rank]).to_owned(),
        rank,
    })
}

/// Singular value thresholding together with the rank of the result.
///
/// Internal variant used by the solvers, which need the post-threshold rank
/// for their iteration diagnostics without a second decomposition.
pub(crate) fn svt_with_rank(a: &Array2<f64>, tau: f64) -> Result<(Array2<f64>, usize)> {
    if tau < 0.0 {
        return Err(Error::InvalidInput(format!(
            "threshold must be nonnegative, got {tau}"
        )));
    }
    let (u, sigma, v) = thin_svd(a)?;
    let kept = sigma.iter().take_while(|&&s| s > tau).count();
    if kept == 0 {
        return Ok((Array2::zeros(a.dim()), 0));
    }
    // U_k · diag(sigma_k - tau) · V_kᵀ over the surviving triplets only.
    let u_k = u.slice(ndarray::s![.., ..kept]);
    let v_k = v.slice(ndarray::s![.., ..kept]);
    let mut scaled = u_k.to_owned();
    for (j, mut col) in scaled.axis_iter_mut(Axis(1)).enumerate() {
        col *= sigma[j] - tau;
    }
    Ok((scaled.dot(&v_k.t()), kept))
}

/// Singular value thresholding: applies `x ↦ sign(x)·max(|x| − tau, 0)` to
/// the singular values, i.e. the proximal operator of `tau·‖·‖_*`.
pub fn svt(a: &DataMatrix, tau: f64) -> Result<DataMatrix> {
    let (out, _) = svt_with_rank(a.values(), tau)?;
    DataMatrix::new(out)
}

/// Column-wise (2,1)-norm shrinkage together with the count of surviving
/// (nonzero) columns.
pub(crate) fn column_shrink_with_count(q: &Array2<f64>, tau: f64) -> Result<(Array2<f64>, usize)> {
    if tau < 0.0 {
        return Err(Error::InvalidInput(format!(
            "threshold must be nonnegative, got {tau}"
        )));
    }
    let mut out = Array2::zeros(q.dim());
    let mut nonzero = 0;
    for (j, col) in q.axis_iter(Axis(1)).enumerate() {
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > tau {
            let scale = (norm - tau) / norm;
            for (i, &v) in col.iter().enumerate() {
                out[(i, j)] = scale * v;
            }
            nonzero += 1;
        }
        // A column at or below the threshold (including the zero column)
        // maps to zero: the 0/0 case is defined as zero.
    }
    Ok((out, nonzero))
}

/// Column shrinkage: the proximal operator of `tau·‖·‖_{2,1}`.
///
/// Column i of the output is `max(‖q_i‖₂ − tau, 0) · q_i/‖q_i‖₂`, with a
/// zero column mapping to a zero column.
pub fn column_shrink(q: &DataMatrix, tau: f64) -> Result<DataMatrix> {
    let (out, _) = column_shrink_with_count(q.values(), tau)?;
    DataMatrix::new(out)
}

/// Shape interaction matrix: `V_r·V_rᵀ` from the skinny SVD of `a`.
///
/// The result is the orthogonal projector onto the row space of `a`
/// (symmetric, idempotent, eigenvalues in {0, 1}, trace = rank). Undefined
/// for the zero matrix.
pub fn sim(a: &DataMatrix, rank_tol: f64) -> Result<Array2<f64>> {
    let f = skinny_svd(a, rank_tol)?;
    if f.rank == 0 {
        return Err(Error::DegenerateInput(
            "shape interaction matrix is undefined for a rank-0 matrix".into(),
        ));
    }
    Ok(f.v.dot(&f.v.t()))
}

/// Largest singular value (operator 2-norm).
pub fn spectral_norm(a: &Array2<f64>) -> Result<f64> {
    let (_, sigma, _) = thin_svd(a)?;
    Ok(sigma.iter().cloned().fold(0.0, f64::max))
}

/// Sum of singular values (nuclear norm).
pub fn nuclear_norm(a: &Array2<f64>) -> Result<f64> {
    let (_, sigma, _) = thin_svd(a)?;
    Ok(sigma.sum())
}

/// Sum of column Euclidean norms ((2,1)-norm).
pub fn l21_norm(a: &Array2<f64>) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .sum()
}

/// Largest column Euclidean norm (the dual norm of the (2,1)-norm).
pub fn max_column_norm(a: &Array2<f64>) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Largest entry magnitude (max-norm).
pub fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0, |acc, v| f64::max(acc, v.abs()))
}

/// Frobenius norm.
pub fn frobenius_norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}
