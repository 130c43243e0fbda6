//! From representation matrices to cluster labels.
//!
//! Affinity construction, a normalized-cut style spectral clustering with
//! fully deterministic seeding, and permutation-invariant accuracy scoring
//! via optimal assignment.

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{from_faer, to_faer};
use crate::seed;

/// Number of k-means restarts inside `spectral_cluster`.
pub const KMEANS_RESTARTS: usize = 20;
/// Cap on Lloyd iterations per restart.
pub const KMEANS_MAX_ITERS: usize = 100;
/// Seed-derivation tag separating k-means restart streams from other users
/// of the same base seed.
const KMEANS_RESTART_TAG: u64 = 0x6b6d_6561_6e73;

/// A symmetric, nonnegative n×n similarity matrix.
#[derive(Debug, Clone)]
pub struct Affinity {
    w: Array2<f64>,
}

impl Affinity {
    /// Validates squareness, finiteness, symmetry (within 1e-10), and
    /// nonnegativity.
    pub fn new(w: Array2<f64>) -> Result<Self> {
        if w.nrows() != w.ncols() || w.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "affinity must be square and nonempty, got {}x{}",
                w.nrows(),
                w.ncols()
            )));
        }
        if !w.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(
                "affinity contains non-finite entries".into(),
            ));
        }
        if w.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidInput(
                "affinity contains negative entries".into(),
            ));
        }
        let asym = w
            .iter()
            .zip(w.t().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if asym > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "affinity is asymmetric by {asym:.3e} (tolerance 1e-10)"
            )));
        }
        Ok(Self { w })
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    /// Borrows the similarity matrix.
    pub fn matrix(&self) -> &Array2<f64> {
        &self.w
    }
}

/// Per-sample cluster assignments with ids in `[0, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    assignment: Vec<usize>,
}

impl Labels {
    /// Wraps an assignment vector; must be nonempty.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidInput("labels must be nonempty".into()));
        }
        Ok(Self { assignment })
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Smallest k such that every id lies in `[0, k)`.
    pub fn k(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assignment
    }
}

/// Affinity used after the representation solver: `W = |Z| + |Zᵀ|`.
pub fn affinity_lrr(z: &Array2<f64>) -> Result<Affinity> {
    if z.nrows() != z.ncols() {
        return Err(Error::InvalidInput(format!(
            "representation matrix must be square, got {}x{}",
            z.nrows(),
            z.ncols()
        )));
    }
    if !z.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput(
            "representation matrix contains non-finite entries".into(),
        ));
    }
    let w = Array2::from_shape_fn(z.dim(), |(i, j)| z[(i, j)].abs() + z[(j, i)].abs());
    Affinity::new(w)
}

/// Affinity for an already-symmetric source such as the shape interaction
/// matrix: `W = |Z|`.
///
/// Asymmetry within 1e-6 is repaired by averaging; anything larger is an
/// error.
pub fn affinity_rsi(z: &Array2<f64>) -> Result<Affinity> {
    if z.nrows() != z.ncols() {
        return Err(Error::InvalidInput(format!(
            "affinity source must be square, got {}x{}",
            z.nrows(),
            z.ncols()
        )));
    }
    if !z.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput(
            "affinity source contains non-finite entries".into(),
        ));
    }
    let asym = z
        .iter()
        .zip(z.t().iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if asym > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "affinity source is asymmetric by {asym:.3e} (tolerance 1e-6)"
        )));
    }
    let w = Array2::from_shape_fn(z.dim(), |(i, j)| (0.5 * (z[(i, j)] + z[(j, i)])).abs());
    Affinity::new(w)
}

/// Normalized-cut style spectral clustering.
///
/// Pipeline: degree matrix from W (zero-degree samples are given unit
/// self-similarity so the Laplacian stays well-defined), symmetric
/// normalization `D^{-1/2} W D^{-1/2}`, the k leading eigenvectors
/// (equivalently the bottom k of the symmetric normalized Laplacian), row
/// normalization to unit length (zero rows left zero), then k-means with
/// k-means++ seeding driven by `seed`: 20 restarts, best within-cluster sum
/// of squares wins, ties broken by lowest restart index.
pub fn spectral_cluster(w: &Affinity, k: usize, seed: u64) -> Result<Labels> {
    let n = w.n();
    if k == 0 {
        return Err(Error::InvalidInput(
            "cluster count must be at least 1".into(),
        ));
    }
    if k > n {
        return Err(Error::InvalidInput(format!(
            "cluster count {k} exceeds sample count {n}"
        )));
    }

    let mut sim = w.matrix().clone();
    let mut degrees: Array1<f64> = sim.sum_axis(Axis(1));
    for i in 0..n {
        if degrees[i] == 0.0 {
            sim[(i, i)] = 1.0;
            degrees[i] = 1.0;
        }
    }
    let inv_sqrt: Array1<f64> = degrees.mapv(|d| 1.0 / d.sqrt());
    let mut s = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = inv_sqrt[i] * sim[(i, j)] * inv_sqrt[j];
        }
    }
    // Guard the eigensolver against accumulated rounding asymmetry.
    let s = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (s[(i, j)] + s[(j, i)]));

    let eig = to_faer(&s)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::DecompositionFailure(format!("eigendecomposition failed: {e:?}")))?;
    let eigenvalues = eig.S();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigenvalues[b]
            .partial_cmp(&eigenvalues[a])
            .expect("finite eigenvalues")
            .then(a.cmp(&b))
    });
    let vecs = from_faer(eig.U());
    let mut embed = Array2::zeros((n, k));
    for (dst, &src) in order.iter().take(k).enumerate() {
        for i in 0..n {
            embed[(i, dst)] = vecs[(i, src)];
        }
    }
    for mut row in embed.axis_iter_mut(Axis(0)) {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row /= norm;
        }
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..KMEANS_RESTARTS {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed::derive(seed, &[KMEANS_RESTART_TAG, restart as u64]));
        let (labels, wcss) = kmeans_once(&embed, k, &mut rng);
        let better = match &best {
            None => true,
            Some((best_wcss, _)) => wcss < *best_wcss,
        };
        if better {
            best = Some((wcss, labels));
        }
    }
    let (_, assignment) = best.expect("at least one restart ran");
    Labels::new(assignment)
}

/// One k-means run: k-means++ seeding followed by Lloyd iterations.
/// Returns the assignment and its within-cluster sum of squares.
fn kmeans_once(points: &Array2<f64>, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = points.nrows();
    let dim = points.ncols();

    // k-means++ seeding.
    let mut centers = Array2::zeros((k, dim));
    let first = rng.gen_range(0..n);
    centers.row_mut(0).assign(&points.row(first));
    let mut dist2 = vec![0.0f64; n];
    for (i, d) in dist2.iter_mut().enumerate() {
        *d = sq_dist(points, i, &centers, 0);
    }
    for c in 1..k {
        let total: f64 = dist2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &d) in dist2.iter().enumerate() {
                acc += d;
                if acc > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centers.row_mut(c).assign(&points.row(pick));
        for (i, best) in dist2.iter_mut().enumerate() {
            let d = sq_dist(points, i, &centers, c);
            if d < *best {
                *best = d;
            }
        }
    }

    // Lloyd iterations; ties go to the lowest center index.
    let mut assignment = vec![0usize; n];
    for _ in 0..KMEANS_MAX_ITERS {
        let mut changed = false;
        for (i, slot) in assignment.iter_mut().enumerate() {
            let mut best_c = 0;
            let mut best_d = sq_dist(points, i, &centers, 0);
            for c in 1..k {
                let d = sq_dist(points, i, &centers, c);
                if d < best_d {
                    best_d = d;
                    best_c = c;
                }
            }
            if *slot != best_c {
                *slot = best_c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = Array2::<f64>::zeros((k, dim));
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let c = assignment[i];
            counts[c] += 1;
            for d in 0..dim {
                sums[(c, d)] += points[(i, d)];
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for d in 0..dim {
                    centers[(c, d)] = sums[(c, d)] / counts[c] as f64;
                }
            }
            // An emptied cluster keeps its previous center.
        }
    }

    let wcss = (0..n)
        .map(|i| sq_dist(points, i, &centers, assignment[i]))
        .sum();
    (assignment, wcss)
}

fn sq_dist(points: &Array2<f64>, i: usize, centers: &Array2<f64>, c: usize) -> f64 {
    let mut acc = 0.0;
    for d in 0..points.ncols() {
        let diff = points[(i, d)] - centers[(c, d)];
        acc += diff * diff;
    }
    acc
}

/// Fraction of agreeing positions under the best bijective relabeling,
/// computed exactly by optimal assignment on the confusion matrix.
pub fn segmentation_accuracy(pred: &Labels, truth: &Labels) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::InvalidInput(format!(
            "label length mismatch: {} vs {}",
            pred.len(),
            truth.len()
        )));
    }
    let n = pred.len();
    let k = pred.k().max(truth.k());
    let mut confusion = Array2::<f64>::zeros((k, k));
    for (&p, &t) in pred.as_slice().iter().zip(truth.as_slice()) {
        confusion[(p, t)] += 1.0;
    }
    // Maximize agreement = minimize negated counts.
    let cost = confusion.mapv(|v| -v);
    let assignment = hungarian_min(&cost);
    let matched: f64 = assignment
        .iter()
        .enumerate()
        .map(|(row, &col)| confusion[(row, col)])
        .sum();
    Ok(matched / n as f64)
}

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// algorithm with potentials, O(k³)). Returns the column assigned to each
/// row.
pub fn hungarian_min(cost: &Array2<f64>) -> Vec<usize> {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "assignment needs a square cost matrix");
    // 1-indexed arrays; index 0 is the virtual start column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1]; // row currently matched to each column
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if row_of[j] > 0 {
            assignment[row_of[j] - 1] = j - 1;
        }
    }
    assignment
}
