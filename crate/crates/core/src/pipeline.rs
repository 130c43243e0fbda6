//! End-to-end methods and the outlier-robustness experiment harness.
//!
//! Two clustering pipelines share the spectral back end:
//!
//! * `run_rsi` — denoise by column-sparse robust PCA, take the shape
//!   interaction matrix of the corrected data, cluster `|Z|`.
//! * `run_lrr` — solve the noisy low-rank representation program on the raw
//!   data, cluster `|Z| + |Zᵀ|`.
//!
//! Alongside them: an empirical verifier for the equivalence between the
//! noiseless representation program and the shape interaction matrix, a
//! robustness sweep over outlier fractions, and matrix denoising for either
//! method.

use ndarray::Array2;
use rayon::prelude::*;

use crate::clustering::{
    affinity_lrr, affinity_rsi, segmentation_accuracy, spectral_cluster, Labels,
};
use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_norm, max_abs, nuclear_norm, sim, skinny_svd, DataMatrix, DEFAULT_RANK_TOL,
};
use crate::seed;
use crate::solvers::{solve_csrpca, solve_lrr_noiseless, solve_lrr_noisy, AlmConfig};
use crate::synthgen::{generate, SyntheticSpec};

/// Rank tolerance for the shape interaction matrix of singular-value
/// thresholded output. The thresholding zeroes trailing singular values
/// exactly, so the spectrum is cleanly separated and a looser tolerance than
/// the clean-data default is appropriate.
pub const DENOISED_SIM_RANK_TOL: f64 = 1e-6;

const SWEEP_DATA_TAG: u64 = 0x7377_6565_702d_6474; // distinguishes data streams
const SWEEP_SPECTRAL_TAG: u64 = 0x7377_6565_702d_7370; // ...from spectral streams

/// Which end-to-end method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Noisy low-rank representation on the raw data.
    Lrr,
    /// Robust shape interaction: denoise, then cluster the projector.
    Rsi,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lrr => "lrr",
            Method::Rsi => "rsi",
        }
    }

    /// Stable tag for seed derivation.
    fn tag(self) -> u64 {
        match self {
            Method::Lrr => 0,
            Method::Rsi => 1,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lrr" => Ok(Method::Lrr),
            "rsi" => Ok(Method::Rsi),
            other => Err(Error::InvalidInput(format!(
                "unknown method '{other}' (expected 'lrr' or 'rsi')"
            ))),
        }
    }
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone)]
pub struct MethodReport {
    pub labels: Labels,
    /// The matrix the affinity was built from (shape interaction matrix for
    /// RSI, representation matrix for LRR).
    pub z: Array2<f64>,
    /// Corrected data, when the method produces one.
    pub d: Option<DataMatrix>,
    /// Column-sparse noise estimate.
    pub e: Option<DataMatrix>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    /// Present iff ground truth was supplied.
    pub accuracy: Option<f64>,
}

/// Robust shape interaction pipeline: `solve_csrpca` → `sim(D)` →
/// `affinity_rsi` → `spectral_cluster`.
///
/// `rank_tol` defaults to [`DENOISED_SIM_RANK_TOL`]; accuracy is scored when
/// `truth` is supplied.
pub fn run_rsi(
    x: &DataMatrix,
    k: usize,
    cfg: &AlmConfig,
    spectral_seed: u64,
    rank_tol: Option<f64>,
    truth: Option<&Labels>,
) -> Result<MethodReport> {
    let solved = solve_csrpca(x, cfg)?;
    let z = sim(&solved.d, rank_tol.unwrap_or(DENOISED_SIM_RANK_TOL)).map_err(|e| match e {
        Error::DegenerateInput(_) => {
            Error::DegenerateInput("the corrected data came back rank-0; nothing to cluster".into())
        }
        other => other,
    })?;
    let affinity = affinity_rsi(&z)?;
    let labels = spectral_cluster(&affinity, k, spectral_seed)?;
    let accuracy = match truth {
        Some(t) => Some(segmentation_accuracy(&labels, t)?),
        None => None,
    };
    Ok(MethodReport {
        labels,
        z,
        d: Some(solved.d),
        e: Some(solved.e),
        iterations: solved.iterations,
        converged: solved.converged,
        residual: solved.residual,
        accuracy,
    })
}

/// Baseline pipeline: `solve_lrr_noisy` → `affinity_lrr` →
/// `spectral_cluster`.
pub fn run_lrr(
    x: &DataMatrix,
    k: usize,
    cfg: &AlmConfig,
    spectral_seed: u64,
    truth: Option<&Labels>,
) -> Result<MethodReport> {
    let solved = solve_lrr_noisy(x, cfg)?;
    let affinity = affinity_lrr(&solved.z)?;
    let labels = spectral_cluster(&affinity, k, spectral_seed)?;
    let accuracy = match truth {
        Some(t) => Some(segmentation_accuracy(&labels, t)?),
        None => None,
    };
    Ok(MethodReport {
        labels,
        z: solved.z,
        d: None,
        e: Some(solved.e),
        iterations: solved.iterations,
        converged: solved.converged,
        residual: solved.residual,
        accuracy,
    })
}

/// Gap report from the noiseless-representation equivalence check.
#[derive(Debug, Clone, Copy)]
pub struct ProjectorIdentityReport {
    /// ‖Z − SIM(X)‖_F / ‖SIM(X)‖_F.
    pub sim_gap: f64,
    /// |‖Z‖_* − rank(X)|.
    pub nuclear_gap: f64,
    /// ‖X − XZ‖_∞.
    pub feasibility: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves the noiseless representation program iteratively and measures how
/// far its solution is from the shape interaction matrix of `x`, how far its
/// nuclear norm is from rank(x), and how feasible it is.
///
/// The caller is responsible for supplying clean (noise-free) data; on noisy
/// data the gaps are still reported but carry no pass/fail meaning.
pub fn verify_projector_identity(
    x: &DataMatrix,
    cfg: &AlmConfig,
) -> Result<ProjectorIdentityReport> {
    let solved = solve_lrr_noiseless(x, cfg)?;
    let projector = sim(x, DEFAULT_RANK_TOL)?;
    let rank = skinny_svd(x, DEFAULT_RANK_TOL)?.rank;
    let diff = &solved.z - &projector;
    let sim_gap = frobenius_norm(&diff) / frobenius_norm(&projector);
    let nuclear_gap = (nuclear_norm(&solved.z)? - rank as f64).abs();
    let feasibility = max_abs(&(x.values() - &x.values().dot(&solved.z)));
    Ok(ProjectorIdentityReport {
        sim_gap,
        nuclear_gap,
        feasibility,
        iterations: solved.iterations,
        converged: solved.converged,
    })
}

/// One scored trial of the robustness sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub fraction: f64,
    pub method: Method,
    pub trial: usize,
    /// `None` records a failed (non-converged or degenerate) trial — a
    /// missing cell rather than an aborted sweep.
    pub accuracy: Option<f64>,
}

/// Mean/std summary of one (fraction, method) cell group.
#[derive(Debug, Clone, Copy)]
pub struct SummaryRow {
    pub fraction: f64,
    pub method: Method,
    pub mean: f64,
    /// Unbiased (n−1 denominator) standard deviation; NaN when fewer than
    /// two trials produced a value.
    pub std: f64,
}

/// Full sweep output: per-trial rows plus per-cell summaries, both in
/// deterministic order (fractions as given, methods lrr-then-rsi, trials
/// ascending).
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SummaryRow>,
    pub trials: usize,
}

/// Runs both methods over a grid of outlier fractions.
///
/// For every (fraction, trial) cell a dataset is generated from a seed
/// derived from `(sweep_seed, fraction bits, trial)`, so both methods see
/// identical data within a trial, results do not depend on which other
/// fractions are in the list, and trials may execute concurrently without
/// affecting output. Each method's spectral seed additionally mixes in the
/// method tag. Failed trials become missing cells.
pub fn outlier_sweep(
    spec: &SyntheticSpec,
    fractions: &[f64],
    trials: usize,
    cfg_lrr: &AlmConfig,
    cfg_rsi: &AlmConfig,
    sweep_seed: u64,
) -> Result<SweepResult> {
    spec.validate()?;
    cfg_lrr.validate()?;
    cfg_rsi.validate()?;
    if fractions.is_empty() {
        return Err(Error::InvalidInput("fraction list must be nonempty".into()));
    }
    if let Some(bad) = fractions
        .iter()
        .find(|f| !(0.0..=1.0).contains(*f) || !f.is_finite())
    {
        return Err(Error::InvalidInput(format!(
            "fractions must lie in [0, 1], got {bad}"
        )));
    }
    if trials < 2 {
        return Err(Error::InvalidInput(format!(
            "at least 2 trials are required for a standard deviation, got {trials}"
        )));
    }

    let k = spec.k;
    let cells: Vec<(usize, usize)> = (0..fractions.len())
        .flat_map(|fi| (0..trials).map(move |t| (fi, t)))
        .collect();

    // Each cell yields (lrr accuracy, rsi accuracy); indexed parallel
    // collect preserves cell order regardless of scheduling.
    let cell_scores: Vec<(Option<f64>, Option<f64>)> = cells
        .par_iter()
        .map(|&(fi, trial)| {
            let fraction = fractions[fi];
            let cell_words = [fraction.to_bits(), trial as u64];
            let data_seed =
                seed::derive(sweep_seed, &[SWEEP_DATA_TAG, cell_words[0], cell_words[1]]);
            let cell_spec = SyntheticSpec {
                outlier_fraction: fraction,
                seed: data_seed,
                ..spec.clone()
            };
            let (x, gt) = match generate(&cell_spec) {
                Ok(v) => v,
                Err(_) => return (None, None),
            };
            let score = |method: Method| -> Option<f64> {
                let spectral_seed = seed::derive(
                    sweep_seed,
                    &[
                        SWEEP_SPECTRAL_TAG,
                        cell_words[0],
                        cell_words[1],
                        method.tag(),
                    ],
                );
                let report = match method {
                    Method::Lrr => run_lrr(&x, k, cfg_lrr, spectral_seed, Some(&gt.labels)),
                    Method::Rsi => run_rsi(&x, k, cfg_rsi, spectral_seed, None, Some(&gt.labels)),
                };
                match report {
                    Ok(r) if r.converged => r.accuracy,
                    _ => None,
                }
            };
            (score(Method::Lrr), score(Method::Rsi))
        })
        .collect();

    let mut rows = Vec::with_capacity(fractions.len() * 2 * trials);
    for (fi, &fraction) in fractions.iter().enumerate() {
        for method in [Method::Lrr, Method::Rsi] {
            for trial in 0..trials {
                let (lrr, rsi) = cell_scores[fi * trials + trial];
                let accuracy = match method {
                    Method::Lrr => lrr,
                    Method::Rsi => rsi,
                };
                rows.push(SweepRow {
                    fraction,
                    method,
                    trial,
                    accuracy,
                });
            }
        }
    }

    let mut summary = Vec::with_capacity(fractions.len() * 2);
    for (fi, &fraction) in fractions.iter().enumerate() {
        for method in [Method::Lrr, Method::Rsi] {
            let values: Vec<f64> = (0..trials)
                .filter_map(|t| {
                    let (lrr, rsi) = cell_scores[fi * trials + t];
                    match method {
                        Method::Lrr => lrr,
                        Method::Rsi => rsi,
                    }
                })
                .collect();
            let (mean, std) = mean_std(&values);
            summary.push(SummaryRow {
                fraction,
                method,
                mean,
                std,
            });
        }
    }

    Ok(SweepResult {
        rows,
        summary,
        trials,
    })
}

/// Mean and unbiased standard deviation; NaN where undefined.
fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Splits `x` into corrected data and noise with the chosen method.
///
/// The robust-shape-interaction path returns the robust PCA decomposition
/// directly; the representation path reconstructs the corrected data as
/// `X·Z` with the solved representation and returns the solver's noise term.
pub fn denoise(
    x: &DataMatrix,
    method: Method,
    cfg: &AlmConfig,
) -> Result<(DataMatrix, DataMatrix)> {
    match method {
        Method::Rsi => {
            let solved = solve_csrpca(x, cfg)?;
            Ok((solved.d, solved.e))
        }
        Method::Lrr => {
            let solved = solve_lrr_noisy(x, cfg)?;
            let corrected = DataMatrix::new(x.values().dot(&solved.z)).map_err(|_| {
                Error::DecompositionFailure("corrected data came back non-finite".into())
            })?;
            Ok((corrected, solved.e))
        }
    }
}
