//! Shared fixtures and test-local oracles.
//!
//! The oracles here are deliberately independent of the library's numerical
//! backend: eigenvalues come from a hand-rolled cyclic Jacobi iteration,
//! assignment optima from brute-force permutation search, and orthogonal
//! factors from modified Gram–Schmidt. They exist so the library's SVD-based
//! results are checked against a second, unrelated computation.
#![allow(dead_code)]

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
///
/// Independent oracle for the SVD backend: the squared singular values of A
/// must match the eigenvalues of AᵀA.
pub fn jacobi_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi oracle needs a square matrix");
    let mut m = a.clone();
    let scale = m.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[[p, q]].abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * m[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[[i, i]]).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

fn visit_permutations(perm: &mut Vec<usize>, from: usize, visit: &mut dyn FnMut(&[usize])) {
    if from == perm.len() {
        visit(perm);
        return;
    }
    for i in from..perm.len() {
        perm.swap(from, i);
        visit_permutations(perm, from + 1, visit);
        perm.swap(from, i);
    }
}

/// Best agreement fraction over all bijective relabelings of `pred`,
/// found by exhaustive search (practical for k ≤ 6).
pub fn brute_force_accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    let k = pred
        .iter()
        .chain(truth.iter())
        .max()
        .map(|&m| m + 1)
        .unwrap_or(1);
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0usize;
    visit_permutations(&mut perm, 0, &mut |p| {
        let matches = pred
            .iter()
            .zip(truth.iter())
            .filter(|&(&a, &b)| p[a] == b)
            .count();
        best = best.max(matches);
    });
    best as f64 / pred.len() as f64
}

/// Standard-normal matrix from a fixed stream.
pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.sample::<f64, _>(StandardNormal))
}

/// Matrix of exact rank `r` (with probability 1) as a tall-thin product.
pub fn random_rank_r(rng: &mut ChaCha8Rng, rows: usize, cols: usize, r: usize) -> Array2<f64> {
    gaussian_matrix(rng, rows, r).dot(&gaussian_matrix(rng, r, cols))
}

/// Orthonormal columns by modified Gram–Schmidt on a Gaussian draw —
/// independent of the library's QR/SVD routines.
pub fn random_orthonormal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    assert!(cols <= rows);
    let mut q = gaussian_matrix(rng, rows, cols);
    for j in 0..cols {
        for prev in 0..j {
            let dot = (0..rows).map(|i| q[[i, prev]] * q[[i, j]]).sum::<f64>();
            for i in 0..rows {
                q[[i, j]] -= dot * q[[i, prev]];
            }
        }
        // Re-orthogonalize once; plain MGS loses orthogonality in ill-luck draws.
        for prev in 0..j {
            let dot = (0..rows).map(|i| q[[i, prev]] * q[[i, j]]).sum::<f64>();
            for i in 0..rows {
                q[[i, j]] -= dot * q[[i, prev]];
            }
        }
        let norm = (0..rows).map(|i| q[[i, j]] * q[[i, j]]).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "degenerate Gaussian draw");
        for i in 0..rows {
            q[[i, j]] /= norm;
        }
    }
    q
}

/// Matrix with prescribed singular values: U·diag(s)·Vᵀ from independently
/// constructed orthonormal factors. Returns (matrix, u, v).
pub fn matrix_with_singular_values(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    s: &[f64],
) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
    let r = s.len();
    assert!(r <= rows.min(cols));
    let u = random_orthonormal(rng, rows, r);
    let v = random_orthonormal(rng, cols, r);
    let mut scaled = u.clone();
    for (j, &sj) in s.iter().enumerate() {
        for i in 0..rows {
            scaled[[i, j]] *= sj;
        }
    }
    (scaled.dot(&v.t()), u, v)
}

/// Max absolute entry, for ∞-norm style comparisons.
pub fn max_abs_entry(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Frobenius norm without going through the library.
pub fn fro(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Euclidean norm of one column.
pub fn col_norm(a: &Array2<f64>, j: usize) -> f64 {
    (0..a.nrows())
        .map(|i| a[[i, j]] * a[[i, j]])
        .sum::<f64>()
        .sqrt()
}

/// Objective of the column-sparse robust PCA program at (D, E): nuclear norm
/// via the Jacobi oracle on DᵀD plus λ × sum of column norms of E.
pub fn csrpca_objective_oracle(d: &Array2<f64>, e: &Array2<f64>, lambda: f64) -> f64 {
    let nuclear: f64 = singular_values_oracle(d).iter().sum();
    let l21: f64 = (0..e.ncols()).map(|j| col_norm(e, j)).sum();
    nuclear + lambda * l21
}

/// Sorted singular values (descending) via the Jacobi oracle on AᵀA.
///
/// Eigenvalues of the Gram matrix below its roundoff floor are clamped to
/// zero before the square root; otherwise √(ε·‖A‖²) noise (~1e-9 · ‖A‖)
/// would masquerade as a tiny singular value.
pub fn singular_values_oracle(a: &Array2<f64>) -> Vec<f64> {
    let evs = jacobi_eigenvalues(&a.t().dot(a));
    let floor = evs.first().map(|top| top.max(0.0) * 1e-13).unwrap_or(0.0);
    evs.iter()
        .map(|&ev| if ev > floor { ev.sqrt() } else { 0.0 })
        .collect()
}
