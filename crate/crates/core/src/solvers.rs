//! Inexact augmented Lagrange multiplier solvers.
//!
//! Three convex programs share the machinery here:
//!
//! * column-sparse robust PCA:  min ‖D‖_* + λ‖E‖_{2,1}  s.t.  X = D + E
//! * noisy low-rank representation:  min ‖Z‖_* + λ‖E‖_{2,1}  s.t.  X = XZ + E
//! * noiseless low-rank representation:  min ‖Z‖_*  s.t.  X = XZ
//!
//! Each takes one proximal step per variable per iteration while growing the
//! penalty μ geometrically. Convergence is declared on primal feasibility
//! alone (max-norm of the constraint violation below `eps`); hitting the
//! iteration cap is a reported state, not an error, so parameter sweeps over
//! hard instances complete and keep their diagnostics.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{
    column_shrink_with_count, from_faer, max_abs, max_column_norm, spectral_norm, svt_with_rank,
    to_faer, DataMatrix,
};

/// Parameters for the inexact ALM loops.
///
/// `mu0` and `mu_max` are optional because their defaults depend on the
/// data: unset, they resolve to `1.25/‖X‖₂` and `1e10·μ₀` at solve time.
/// The remaining defaults are ρ = 1.5, ε = 1e-7, and a 1000-iteration cap.
#[derive(Debug, Clone)]
pub struct AlmConfig {
    /// Tradeoff weight λ on the column-sparse term.
    pub lambda: f64,
    /// Initial penalty μ₀; `None` resolves to `1.25/‖X‖₂`.
    pub mu0: Option<f64>,
    /// Penalty growth factor ρ > 1.
    pub rho: f64,
    /// Penalty cap; `None` resolves to `1e10·μ₀`.
    pub mu_max: Option<f64>,
    /// Primal feasibility tolerance (max-norm).
    pub eps: f64,
    /// Iteration cap.
    pub max_iter: usize,
}

impl AlmConfig {
    /// Config with the documented defaults and the given λ.
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            mu0: None,
            rho: 1.5,
            mu_max: None,
            eps: 1e-7,
            max_iter: 1000,
        }
    }

    /// Checks every positivity/ordering constraint that can be checked
    /// without seeing the data.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "lambda must be positive and finite, got {}",
                self.lambda
            )));
        }
        if !(self.rho > 1.0 && self.rho.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "rho must exceed 1, got {}",
                self.rho
            )));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        if let Some(mu0) = self.mu0 {
            if !(mu0 > 0.0 && mu0.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "mu0 must be positive, got {mu0}"
                )));
            }
        }
        if let Some(mu_max) = self.mu_max {
            if !(mu_max > 0.0 && mu_max.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "mu_max must be positive, got {mu_max}"
                )));
            }
            if let Some(mu0) = self.mu0 {
                if mu_max <= mu0 {
                    return Err(Error::InvalidInput(format!(
                        "mu_max ({mu_max}) must exceed mu0 ({mu0})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Resolves the data-dependent penalty schedule against ‖X‖₂.
    fn penalty_schedule(&self, x_spectral: f64) -> (f64, f64) {
        // For the all-zero matrix any positive μ₀ works; the loop converges
        // on the first feasibility check.
        let mu0 = self.mu0.unwrap_or(if x_spectral > 0.0 {
            1.25 / x_spectral
        } else {
            1.25
        });
        let mu_max = self.mu_max.unwrap_or(1e10 * mu0);
        (mu0, mu_max)
    }
}

/// One row of solver diagnostics, recorded every iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    /// 1-based iteration number.
    pub iteration: usize,
    /// Primal feasibility (max-norm of the constraint violation) after this
    /// iteration's variable updates.
    pub residual: f64,
    /// Penalty value used by this iteration.
    pub mu: f64,
    /// Rank of the low-rank iterate after thresholding.
    pub rank_d: usize,
    /// Number of nonzero columns in the column-sparse iterate.
    pub e_columns: usize,
}

/// Converged (or capped) decomposition X ≈ D + E with multiplier and
/// per-iteration diagnostics.
#[derive(Debug, Clone)]
pub struct CsrpcaResult {
    pub d: DataMatrix,
    pub e: DataMatrix,
    pub y: DataMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Final ‖X − D − E‖_∞.
    pub residual: f64,
    pub history: Vec<IterRecord>,
}

/// Result of the low-rank representation solvers.
#[derive(Debug, Clone)]
pub struct LrrResult {
    /// n×n representation matrix.
    pub z: Array2<f64>,
    /// m×n column-sparse noise term (all zeros for the noiseless solver).
    pub e: DataMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Final constraint violation (max-norm over every constraint block).
    pub residual: f64,
    pub history: Vec<IterRecord>,
}

fn finite_or_diverged(values: Array2<f64>) -> Result<DataMatrix> {
    DataMatrix::new(values)
        .map_err(|_| Error::DecompositionFailure("solver iterate became non-finite".into()))
}

/// Column-sparse robust PCA by inexact ALM.
///
/// Per iteration: D-update by singular value thresholding at μ⁻¹ on
/// `X − E + μ⁻¹Y`, E-update by column shrinkage at λμ⁻¹ on
/// `X − D + μ⁻¹Y`, multiplier update `Y ← Y + μ(X − D − E)`, penalty update
/// `μ ← min(ρμ, μ_max)`; stops when ‖X − D − E‖_∞ < ε.
pub fn solve_csrpca(x: &DataMatrix, cfg: &AlmConfig) -> Result<CsrpcaResult> {
    cfg.validate()?;
    let xv = x.values();
    let sigma_x = spectral_norm(xv)?;
    let (mu0, mu_max) = cfg.penalty_schedule(sigma_x);

    // Dual-norm-scaled multiplier start: Y₀ = X / max(‖X‖₂, λ⁻¹·max‖x_i‖₂).
    let dual_scale = sigma_x.max(max_column_norm(xv) / cfg.lambda);
    let mut y = if dual_scale > 0.0 {
        xv.mapv(|v| v / dual_scale)
    } else {
        Array2::zeros(xv.dim())
    };

    let mut d = Array2::zeros(xv.dim());
    let mut e = Array2::zeros(xv.dim());
    let mut mu = mu0;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;

    for k in 1..=cfg.max_iter {
        let mu_inv = 1.0 / mu;
        let rank_d;
        (d, rank_d) = svt_with_rank(&(xv - &e + &y.mapv(|v| v * mu_inv)), mu_inv)?;
        let e_columns;
        (e, e_columns) =
            column_shrink_with_count(&(xv - &d + &y.mapv(|v| v * mu_inv)), cfg.lambda * mu_inv)?;

        let r = xv - &d - &e;
        residual = max_abs(&r);
        history.push(IterRecord {
            iteration: k,
            residual,
            mu,
            rank_d,
            e_columns,
        });
        y = y + r.mapv(|v| v * mu);
        iterations = k;
        if residual < cfg.eps {
            converged = true;
            break;
        }
        mu = (cfg.rho * mu).min(mu_max);
    }

    Ok(CsrpcaResult {
        d: finite_or_diverged(d)?,
        e: finite_or_diverged(e)?,
        y: finite_or_diverged(y)?,
        iterations,
        converged,
        residual,
        history,
    })
}

/// Shared ALM loop for the two low-rank representation programs.
///
/// Splits Z from its nuclear-norm argument through an auxiliary J with the
/// constraint Z = J, giving the iteration
///
/// ```text
/// J ← svt(Z + μ⁻¹Y₂, μ⁻¹)
/// Z ← (I + XᵀX)⁻¹ (Xᵀ(X − E) + J + μ⁻¹(XᵀY₁ − Y₂))
/// E ← column_shrink(X − XZ + μ⁻¹Y₁, λμ⁻¹)        (noisy variant only)
/// Y₁ ← Y₁ + μ(X − XZ − E);  Y₂ ← Y₂ + μ(Z − J)
/// ```
///
/// converging when both ‖X − XZ − E‖_∞ and ‖Z − J‖_∞ drop below ε.
fn lrr_alm(x: &DataMatrix, cfg: &AlmConfig, with_noise_term: bool) -> Result<LrrResult> {
    cfg.validate()?;
    let xv = x.values();
    let (m, n) = (xv.nrows(), xv.ncols());
    let sigma_x = spectral_norm(xv)?;
    let (mu0, mu_max) = cfg.penalty_schedule(sigma_x);

    let dual_scale = if with_noise_term {
        sigma_x.max(max_column_norm(xv) / cfg.lambda)
    } else {
        sigma_x
    };
    let mut y1 = if dual_scale > 0.0 {
        xv.mapv(|v| v / dual_scale)
    } else {
        Array2::zeros((m, n))
    };
    let mut y2: Array2<f64> = Array2::zeros((n, n));

    let mut z: Array2<f64> = Array2::zeros((n, n));
    let mut e: Array2<f64> = Array2::zeros((m, n));

    // (I + XᵀX) is symmetric positive definite; factor it once.
    let xt = xv.t();
    let xtx = xt.dot(xv);
    let gram = &xtx + &Array2::<f64>::eye(n);
    let chol = to_faer(&gram).llt(faer::Side::Lower).map_err(|e| {
        Error::DecompositionFailure(format!("I + XᵀX failed its Cholesky factorization: {e:?}"))
    })?;

    let mut mu = mu0;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;

    for k in 1..=cfg.max_iter {
        let mu_inv = 1.0 / mu;

        let (j, rank_j) = svt_with_rank(&(&z + &y2.mapv(|v| v * mu_inv)), mu_inv)?;

        let rhs = xt.dot(&(xv - &e)) + &j + &(xt.dot(&y1) - &y2).mapv(|v| v * mu_inv);
        let solved = faer::prelude::Solve::solve(&chol, &to_faer(&rhs));
        z = from_faer(solved.as_ref());

        let xz = xv.dot(&z);
        let e_columns = if with_noise_term {
            let cols;
            (e, cols) = column_shrink_with_count(
                &(xv - &xz + &y1.mapv(|v| v * mu_inv)),
                cfg.lambda * mu_inv,
            )?;
            cols
        } else {
            0
        };

        let r1 = xv - &xz - &e;
        let r2 = &z - &j;
        let feas1 = max_abs(&r1);
        let feas2 = max_abs(&r2);
        residual = feas1.max(feas2);
        history.push(IterRecord {
            iteration: k,
            residual,
            mu,
            rank_d: rank_j,
            e_columns,
        });
        y1 = y1 + r1.mapv(|v| v * mu);
        y2 = y2 + r2.mapv(|v| v * mu);
        iterations = k;
        if feas1 < cfg.eps && feas2 < cfg.eps {
            converged = true;
            break;
        }
        mu = (cfg.rho * mu).min(mu_max);
    }

    if !z.iter().all(|v| v.is_finite()) {
        return Err(Error::DecompositionFailure(
            "solver iterate became non-finite".into(),
        ));
    }
    Ok(LrrResult {
        z,
        e: finite_or_diverged(e)?,
        iterations,
        converged,
        residual,
        history,
    })
}

/// Noisy low-rank representation: min ‖Z‖_* + λ‖E‖_{2,1} s.t. X = XZ + E.
pub fn solve_lrr_noisy(x: &DataMatrix, cfg: &AlmConfig) -> Result<LrrResult> {
    lrr_alm(x, cfg, true)
}

/// Noiseless low-rank representation: min ‖Z‖_* s.t. X = XZ.
///
/// This runs the full iterative solver rather than any closed-form
/// shortcut — its purpose is to verify, not assume, what the minimizer is.
/// Requires a nonzero matrix.
pub fn solve_lrr_noiseless(x: &DataMatrix, cfg: &AlmConfig) -> Result<LrrResult> {
    if x.values().iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidInput(
            "the noiseless representation program requires a nonzero matrix".into(),
        ));
    }
    lrr_alm(x, cfg, false)
}
