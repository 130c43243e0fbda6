//! Command-line surface.
//!
//! `subseg` has five subcommands. Every subcommand that does numerical work
//! also accepts `--config <file>`; values given as flags override values
//! from the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "subseg",
    version,
    about = "Subspace segmentation via low-rank representation and robust shape interaction",
    after_help = "Exit codes: 0 success, 2 invalid arguments or malformed data, 3 I/O failure.\n\
                  SUBSEG_THREADS caps worker threads (0 or unset picks the machine default)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic multi-subspace dataset
    Generate(GenerateArgs),
    /// Segment a data matrix into k subspace clusters
    Cluster(ClusterArgs),
    /// Split a data matrix into corrected data and column-sparse noise
    Denoise(DenoiseArgs),
    /// Check the representation/projector equivalence and block structure on clean data
    Verify(VerifyArgs),
    /// Run the outlier-robustness study over a grid of corruption fractions
    Sweep(SweepArgs),
}

/// Shared solver knobs. All optional; unset values fall back to the config
/// file, then to the solver defaults.
#[derive(Args, Debug, Default, Clone)]
pub struct SolverArgs {
    /// Weight on the column-sparse noise term
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Convergence tolerance on the feasibility residual (max-norm)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Iteration cap for the augmented Lagrangian loop
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Initial penalty parameter (default: scaled from the data spectrum)
    #[arg(long)]
    pub mu0: Option<f64>,
    /// Penalty growth factor
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// TOML file with the generator parameters (k, subspace_dim, ambient_dim,
    /// points_per_subspace, noise_variance_factor, outlier_fraction,
    /// outlier_variance_factor, seed)
    #[arg(long)]
    pub config: PathBuf,
    /// Override the spec's RNG seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for X.csv, labels.csv, outliers.csv (default: current dir)
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClusterArgs {
    /// TOML parameter file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Data matrix (.csv dense, .mtx matrix market), or a sequence directory
    /// containing X.csv and labels.csv
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Ground-truth label file for accuracy scoring
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Segmentation method: lrr | rsi
    #[arg(long)]
    pub method: Option<String>,
    /// Number of clusters (default: inferred from --truth when supplied)
    #[arg(long)]
    pub k: Option<usize>,
    /// Relative singular-value cutoff when ranking the corrected data
    #[arg(long)]
    pub rank_tol: Option<f64>,
    /// Seed for the spectral clustering stage
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Directory for labels.csv, report.txt, report.toml (default: current dir)
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DenoiseArgs {
    /// TOML parameter file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Data matrix (.csv dense, .mtx matrix market)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Denoising method: lrr | rsi
    #[arg(long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Directory for corrected.csv and noise.csv (default: current dir)
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Generator spec TOML: generate clean data, then verify it.
    /// Mutually exclusive with --input.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Existing data matrix to verify. Mutually exclusive with --config.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Ground-truth labels enabling the block-structure checks on --input data
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Override the spec's RNG seed (with --config)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Convergence tolerance for the representation solver (default 1e-8)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Iteration cap
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Initial penalty parameter
    #[arg(long)]
    pub mu0: Option<f64>,
    /// Penalty growth factor
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Sweep TOML: fractions, trials, lambda_lrr, lambda_rsi, and a [spec]
    /// table with the generator parameters
    #[arg(long)]
    pub config: PathBuf,
    /// Override the sweep master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for results.csv and summary.csv (default: current dir)
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Also write plot.svg with the mean±std accuracy curves
    #[arg(long)]
    pub plot: bool,
}
