//! Shared fixtures for the benchmark targets: datasets at the scale the
//! robustness study uses, generated deterministically through the library's
//! own synthetic generator.

use subseg_core::{generate, DataMatrix, Labels, SyntheticSpec};

/// The robustness-study scale: five 4-dimensional subspaces in R^100 with 20
/// points each, mild noise, and the requested fraction of outlier columns.
pub fn study_spec(outlier_fraction: f64, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        k: 5,
        subspace_dim: 4,
        ambient_dim: 100,
        points_per_subspace: 20,
        noise_variance_factor: 0.1,
        outlier_fraction,
        outlier_variance_factor: 1.0,
        seed,
    }
}

/// A 100x100 study-scale dataset with its ground-truth labels.
pub fn study_dataset(outlier_fraction: f64, seed: u64) -> (DataMatrix, Labels) {
    let (x, gt) = generate(&study_spec(outlier_fraction, seed)).expect("valid fixture spec");
    (x, gt.labels)
}

/// A smaller 40x60 three-subspace dataset for the cheap end of the range.
pub fn small_dataset(seed: u64) -> (DataMatrix, Labels) {
    let spec = SyntheticSpec {
        k: 3,
        subspace_dim: 3,
        ambient_dim: 40,
        points_per_subspace: 20,
        noise_variance_factor: 0.1,
        outlier_fraction: 0.0,
        outlier_variance_factor: 1.0,
        seed,
    };
    let (x, gt) = generate(&spec).expect("valid fixture spec");
    (x, gt.labels)
}
