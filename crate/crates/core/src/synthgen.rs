//! Synthetic union-of-subspaces benchmark data.
//!
//! Draws k independent random subspaces, samples points from each, adds
//! per-point Gaussian noise scaled by the point's norm, and corrupts a
//! controlled fraction of columns with additional heavy noise. Everything
//! is a pure function of the spec (including its seed), so identical specs
//! produce bit-identical data.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clustering::Labels;
use crate::error::{Error, Result};
use crate::linalg::{from_faer, to_faer, DataMatrix};

/// Generator parameters.
///
/// The noise fields follow one convention: a factor f applied to a point p
/// yields a Gaussian noise vector with total expected squared norm
/// `f·‖p‖₂`, spread i.i.d. across the ambient dimensions (per-entry
/// variance `f·‖p‖₂/m`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    /// Number of subspaces.
    pub k: usize,
    /// Dimension of every subspace.
    pub subspace_dim: usize,
    /// Ambient dimension m.
    pub ambient_dim: usize,
    /// Samples drawn per subspace.
    pub points_per_subspace: usize,
    /// Noise scale applied to every point.
    pub noise_variance_factor: f64,
    /// Fraction of columns flagged as outliers, in [0, 1].
    pub outlier_fraction: f64,
    /// Additional noise scale applied to outlier columns.
    pub outlier_variance_factor: f64,
    /// RNG seed; the sole source of randomness.
    pub seed: u64,
}

impl Default for SyntheticSpec {
    /// The synthetic benchmark defaults: 5 four-dimensional subspaces in
    /// ambient dimension 100 with 20 points each, mild per-point noise, no
    /// outliers.
    fn default() -> Self {
        Self {
            k: 5,
            subspace_dim: 4,
            ambient_dim: 100,
            points_per_subspace: 20,
            noise_variance_factor: 0.1,
            outlier_fraction: 0.0,
            outlier_variance_factor: 1.0,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    /// Total number of generated samples.
    pub fn n_samples(&self) -> usize {
        self.k * self.points_per_subspace
    }

    /// Checks every field constraint; error messages name the offending
    /// field.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        if self.subspace_dim == 0 {
            return Err(Error::InvalidInput(
                "subspace_dim must be at least 1".into(),
            ));
        }
        if self.ambient_dim == 0 {
            return Err(Error::InvalidInput("ambient_dim must be at least 1".into()));
        }
        if self.points_per_subspace == 0 {
            return Err(Error::InvalidInput(
                "points_per_subspace must be at least 1".into(),
            ));
        }
        if self.k * self.subspace_dim > self.ambient_dim {
            return Err(Error::InvalidInput(format!(
                "k * subspace_dim ({}) must not exceed ambient_dim ({}); independent subspaces are otherwise unachievable",
                self.k * self.subspace_dim,
                self.ambient_dim
            )));
        }
        if !(self.noise_variance_factor >= 0.0 && self.noise_variance_factor.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "noise_variance_factor must be finite and nonnegative, got {}",
                self.noise_variance_factor
            )));
        }
        if !(0.0..=1.0).contains(&self.outlier_fraction) {
            return Err(Error::InvalidInput(format!(
                "outlier_fraction must lie in [0, 1], got {}",
                self.outlier_fraction
            )));
        }
        if !(self.outlier_variance_factor >= 0.0 && self.outlier_variance_factor.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "outlier_variance_factor must be finite and nonnegative, got {}",
                self.outlier_variance_factor
            )));
        }
        Ok(())
    }
}

/// True structure behind a generated matrix.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    /// Subspace membership per column.
    pub labels: Labels,
    /// Which columns received outlier corruption.
    pub outlier_mask: Vec<bool>,
    /// The pre-noise samples.
    pub clean: DataMatrix,
}

/// Banker's rounding of a nonnegative count.
fn round_half_to_even(x: f64) -> usize {
    let floor = x.floor();
    let frac = x - floor;
    let lower = floor as usize;
    if (frac - 0.5).abs() < 1e-9 {
        if lower.is_multiple_of(2) {
            lower
        } else {
            lower + 1
        }
    } else {
        x.round() as usize
    }
}

/// Generates a corrupted union-of-subspaces sample per `spec`.
///
/// Draw order (fixed, for determinism): per subspace an orthonormalized
/// Gaussian basis followed by Gaussian coefficients; then per-point noise in
/// column order; then the outlier index set (uniform without replacement);
/// then outlier noise in ascending column order. Outlier count is
/// `outlier_fraction·n` rounded half-to-even. Noise scales use the clean
/// column's norm.
pub fn generate(spec: &SyntheticSpec) -> Result<(DataMatrix, GroundTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = spec.ambient_dim;
    let r = spec.subspace_dim;
    let d = spec.points_per_subspace;
    let n = spec.n_samples();

    let mut clean = Array2::zeros((m, n));
    let mut labels = Vec::with_capacity(n);
    for subspace in 0..spec.k {
        // Orthonormalized i.i.d. Gaussian basis: with k·r ≤ m the spans are
        // independent with probability 1.
        let gauss = Array2::from_shape_fn((m, r), |_| rng.sample::<f64, _>(StandardNormal));
        let q = from_faer(to_faer(&gauss).qr().compute_thin_Q().as_ref());
        let coeffs = Array2::from_shape_fn((r, d), |_| rng.sample::<f64, _>(StandardNormal));
        let points = q.dot(&coeffs);
        for j in 0..d {
            let col = subspace * d + j;
            clean.column_mut(col).assign(&points.column(j));
            labels.push(subspace);
        }
    }

    let mut noisy = clean.clone();
    for j in 0..n {
        let norm = clean.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        let sigma = (spec.noise_variance_factor * norm / m as f64).sqrt();
        for i in 0..m {
            let z: f64 = rng.sample(StandardNormal);
            noisy[(i, j)] += sigma * z;
        }
    }

    let outlier_count = round_half_to_even(spec.outlier_fraction * n as f64);
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    let mut chosen: Vec<usize> = indices.into_iter().take(outlier_count).collect();
    chosen.sort_unstable();

    let mut outlier_mask = vec![false; n];
    for &j in &chosen {
        outlier_mask[j] = true;
        let norm = clean.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        let sigma = (spec.outlier_variance_factor * norm / m as f64).sqrt();
        for i in 0..m {
            let z: f64 = rng.sample(StandardNormal);
            noisy[(i, j)] += sigma * z;
        }
    }

    let gt = GroundTruth {
        labels: Labels::new(labels)?,
        outlier_mask,
        clean: DataMatrix::new(clean)?,
    };
    Ok((DataMatrix::new(noisy)?, gt))
}
