//! Spectral clustering of a learned coefficient matrix.
//!
//! `C` is turned into the affinity `1/2 (|C| + |C^T|)`, embedded with the
//! bottom eigenvectors of the symmetric normalized Laplacian (rows scaled to
//! unit length), and partitioned with k-means++ / Lloyd.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use thiserror::Error;

use crate::seeded_rng;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("cluster count {c} is out of range for {n} samples (need 2 <= c <= n)")]
    InvalidClusterCount { c: usize, n: usize },
    #[error("k-means needs at least one restart")]
    NoRestarts,
    #[error("affinity matrix contains a non-finite entry")]
    NonFinite,
    #[error("symmetric eigendecomposition did not converge")]
    EigenFailure,
}

pub type Result<T> = std::result::Result<T, SpectralError>;

/// Symmetric, nonnegative affinity.
#[derive(Debug, Clone, PartialEq)]
pub struct Affinity(DMatrix<f64>);

impl Affinity {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Wraps a matrix that is already symmetric and nonnegative.
    pub fn from_symmetric(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "affinity must be square");
        Self(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub clusters: usize,
    /// Within-cluster sum of squares of the winning restart.
    pub wcss: f64,
}

pub fn symmetrize_affinity(c: &DMatrix<f64>) -> Affinity {
    assert!(c.is_square(), "coefficient matrix must be square");
    let n = c.nrows();
    Affinity(DMatrix::from_fn(n, n, |i, j| {
        0.5 * (c[(i, j)].abs() + c[(j, i)].abs())
    }))
}

/// `I - D^{-1/2} A D^{-1/2}`; zero-degree nodes get no off-diagonal entries.
pub fn normalized_laplacian(a: &Affinity) -> DMatrix<f64> {
    let m = a.matrix();
    let n = m.nrows();
    let inv_sqrt: Vec<f64> = m
        .row_iter()
        .map(|r| {
            let d = r.sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - inv_sqrt[i] * m[(i, j)] * inv_sqrt[j]
    })
}

/// The `count` smallest eigenvalues of symmetric `m` (ascending) and their
/// eigenvectors as columns.
pub fn smallest_eigenpairs(m: &DMatrix<f64>, count: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or(SpectralError::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let chosen = &order[..count.min(n)];
    let values = chosen.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, chosen.len(), |r, c| eig.eigenvectors[(r, chosen[c])]);
    Ok((values, vectors))
}

/// Row-normalized `n x c` spectral embedding.
pub fn spectral_embed(a: &Affinity, c: usize) -> Result<DMatrix<f64>> {
    let n = a.matrix().nrows();
    if c < 2 || c > n {
        return Err(SpectralError::InvalidClusterCount { c, n });
    }
    let (_, mut u) = smallest_eigenpairs(&normalized_laplacian(a), c)?;
    for mut row in u.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    Ok(u)
}

const MAX_LLOYD_ITERATIONS: usize = 300;

fn sqdist_row(points: &DMatrix<f64>, i: usize, center: &[f64]) -> f64 {
    points
        .row(i)
        .iter()
        .zip(center)
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// k-means on the rows of `points`: k-means++ seeding, Lloyd iterations to a
/// fixpoint (at most 300), best of `restarts` by within-cluster sum of squares.
pub fn kmeans(points: &DMatrix<f64>, c: usize, restarts: usize, seed: u64) -> Result<ClusterAssignment> {
    let n = points.nrows();
    if c == 0 || c > n {
        return Err(SpectralError::InvalidClusterCount { c, n });
    }
    if restarts == 0 {
        return Err(SpectralError::NoRestarts);
    }
    let mut rng = seeded_rng(seed);
    let mut best: Option<ClusterAssignment> = None;
    for _ in 0..restarts {
        let run = lloyd(points, plus_plus(points, c, &mut rng));
        if best.as_ref().is_none_or(|b| run.wcss < b.wcss) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn plus_plus(points: &DMatrix<f64>, c: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = points.nrows();
    let row = |i: usize| points.row(i).iter().copied().collect::<Vec<f64>>();
    let mut centers = vec![row(rng.random_range(0..n))];
    let mut nearest: Vec<f64> = (0..n).map(|i| sqdist_row(points, i, &centers[0])).collect();
    while centers.len() < c {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let center = row(pick);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sqdist_row(points, i, &center));
        }
        centers.push(center);
    }
    centers
}

fn lloyd(points: &DMatrix<f64>, mut centers: Vec<Vec<f64>>) -> ClusterAssignment {
    let (n, dim) = points.shape();
    let c = centers.len();
    let mut labels = vec![usize::MAX; n];
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut changed = false;
        for (i, label) in labels.iter_mut().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, center) in centers.iter().enumerate() {
                let d = sqdist_row(points, i, center);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            if *label != best {
                *label = best;
                changed = true;
            }
        }
        changed |= repair_empty(points, &mut labels, &mut centers);
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; c];
        let mut counts = vec![0usize; c];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(points.row(i).iter()) {
                *s += v;
            }
        }
        for ((center, sum), &count) in centers.iter_mut().zip(sums).zip(&counts) {
            *center = sum.into_iter().map(|s| s / count as f64).collect();
        }
    }
    let wcss = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sqdist_row(points, i, &centers[l]))
        .sum();
    ClusterAssignment {
        labels,
        clusters: c,
        wcss,
    }
}

/// Moves the point farthest from its center into each empty cluster.
fn repair_empty(points: &DMatrix<f64>, labels: &mut [usize], centers: &mut [Vec<f64>]) -> bool {
    let c = centers.len();
    let mut repaired = false;
    loop {
        let mut counts = vec![0usize; c];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&k| k == 0) else {
            return repaired;
        };
        let far = (0..labels.len())
            .filter(|&i| counts[labels[i]] > 1)
            .max_by(|&a, &b| {
                let da = sqdist_row(points, a, &centers[labels[a]]);
                let db = sqdist_row(points, b, &centers[labels[b]]);
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("c <= n leaves a cluster with two members");
        labels[far] = empty;
        centers[empty] = points.row(far).iter().copied().collect();
        repaired = true;
    }
}

/// Affinity, embedding and k-means in one call.
pub fn cluster(c_matrix: &DMatrix<f64>, c: usize, restarts: usize, seed: u64) -> Result<ClusterAssignment> {
    let affinity = symmetrize_affinity(c_matrix);
    let embedding = spectral_embed(&affinity, c)?;
    kmeans(&embedding, c, restarts, seed)
}
