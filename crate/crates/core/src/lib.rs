//! Subspace segmentation by low-rank representation and robust shape
//! interaction.
//!
//! The crate provides, bottom to top:
//!
//! * [`linalg`] — validated data matrices, thin/truncated SVD, the shape
//!   interaction matrix, the proximal operators (singular-value thresholding
//!   and column shrinkage) and the matrix norms everything else is built on.
//! * [`solvers`] — inexact augmented-Lagrangian solvers for column-sparse
//!   robust PCA and for the noiseless/noisy low-rank representation
//!   programs.
//! * [`clustering`] — symmetric-normalized spectral clustering with seeded
//!   k-means++, plus permutation-invariant segmentation accuracy.
//! * [`synthgen`] — deterministic generator for unions of random subspaces
//!   with dense noise and column outliers.
//! * [`pipeline`] — the two end-to-end methods, an equivalence verifier for
//!   the noiseless program, the outlier-robustness sweep, and denoising.
//!
//! All randomness flows through explicit `u64` seeds ([`seed`] derives
//! stream-specific subseeds), so every result in the crate is reproducible
//! bit-for-bit across runs and thread counts.

pub mod clustering;
pub mod error;
pub mod linalg;
pub mod pipeline;
pub mod seed;
pub mod solvers;
pub mod synthgen;

pub use clustering::{
    affinity_lrr, affinity_rsi, segmentation_accuracy, spectral_cluster, Affinity, Labels,
    KMEANS_MAX_ITERS, KMEANS_RESTARTS,
};
pub use error::{Error, Result};
pub use linalg::{
    column_shrink, frobenius_norm, l21_norm, max_abs, max_column_norm, nuclear_norm, sim,
    skinny_svd, spectral_norm, svt, thin_svd, DataMatrix, SvdFactors, DEFAULT_RANK_TOL,
};
pub use pipeline::{
    denoise, outlier_sweep, run_lrr, run_rsi, verify_projector_identity, Method, MethodReport,
    ProjectorIdentityReport, SummaryRow, SweepResult, SweepRow, DENOISED_SIM_RANK_TOL,
};
pub use solvers::{
    solve_csrpca, solve_lrr_noiseless, solve_lrr_noisy, AlmConfig, CsrpcaResult, IterRecord,
    LrrResult,
};
pub use synthgen::{generate, GroundTruth, SyntheticSpec};
