//! Configuration file schemas.
//!
//! Every subcommand accepts `--config <file>` pointing at a TOML file whose
//! keys mirror the command-line flags. Flags always win: a value given on the
//! command line overrides the same key from the file. Unknown keys are
//! rejected so that typos surface as validation errors instead of silently
//! falling back to defaults.

use std::path::PathBuf;

use serde::Deserialize;
use subseg_core::SyntheticSpec;

/// Parameter file for `cluster`, `denoise`, and `verify`.
///
/// Carries solver and problem parameters only — never data. The data matrix
/// always arrives through `--input` (or, for `verify`, a generator spec), so
/// a run has exactly one data source.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub method: Option<String>,
    pub lambda: Option<f64>,
    pub k: Option<usize>,
    pub rank_tol: Option<f64>,
    pub seed: Option<u64>,
    pub eps: Option<f64>,
    pub max_iter: Option<usize>,
    pub mu0: Option<f64>,
    pub rho: Option<f64>,
    pub input: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

/// Parameter file for `sweep`.
///
/// The `[spec]` table mirrors the synthetic generator's fields; the sweep
/// grid itself supplies `outlier_fraction` and the per-cell seeds, so those
/// two spec fields are ignored here (each cell overwrites them).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub fractions: Vec<f64>,
    pub trials: usize,
    pub lambda_lrr: f64,
    pub lambda_rsi: f64,
    pub seed: Option<u64>,
    pub eps: Option<f64>,
    pub max_iter: Option<usize>,
    pub rho: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub spec: SyntheticSpec,
}
