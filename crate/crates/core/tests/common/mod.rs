//! Naive reference implementations used by the integration and acceptance
//! tests. Everything here is written with plain loops over indices and
//! shares no code with the library.
#![allow(dead_code)]

use mscnlg::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

/// Random symmetric nonnegative weights with a zero diagonal; roughly half
/// of the pairs are left unconnected.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.5) {
                let v = rng.random_range(0.0..1.0);
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
    }
    w
}

// ---------------------------------------------------------------------------
// Graphs

pub fn naive_sqdist(points: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = points.ncols();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let mut s = 0.0;
            for r in 0..points.nrows() {
                let d = points[(r, a)] - points[(r, b)];
                s += d * d;
            }
            out[i][j] = s;
        }
    }
    out
}

/// Median of the off-diagonal distances, or `None` when it is zero.
pub fn naive_median(sq: &[Vec<f64>]) -> Option<f64> {
    let n = sq.len();
    let mut all = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            all.push(sq[i][j].sqrt());
        }
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = all.len();
    let med = if m % 2 == 1 {
        all[m / 2]
    } else {
        0.5 * (all[m / 2 - 1] + all[m / 2])
    };
    (med > 0.0).then_some(med)
}

/// `j` is a k-nearest neighbour of `i` when fewer than `k` other points come
/// strictly before it in (distance, index) order.
pub fn naive_is_knn(sq: &[Vec<f64>], i: usize, j: usize, k: usize) -> bool {
    if i == j {
        return false;
    }
    let mut before = 0;
    for l in 0..sq.len() {
        if l == i || l == j {
            continue;
        }
        if sq[i][l] < sq[i][j] || (sq[i][l] == sq[i][j] && l < j) {
            before += 1;
        }
    }
    before < k
}

pub fn naive_mknn(sq: &[Vec<f64>], k: usize) -> Vec<Vec<bool>> {
    let n = sq.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = naive_is_knn(sq, i, j, k) && naive_is_knn(sq, j, i, k);
        }
    }
    out
}

/// Gaussian mutual-kNN graph over the columns of `points`; `None` when the
/// median distance is zero.
pub fn naive_kernel_graph(points: &DMatrix<f64>, k: usize) -> Option<DMatrix<f64>> {
    let sq = naive_sqdist(points);
    let sigma = naive_median(&sq)?;
    let mask = naive_mknn(&sq, k);
    let n = sq.len();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if mask[i][j] {
                w[(i, j)] = (-sq[i][j] / (sigma * sigma)).exp();
            }
        }
    }
    Some(w)
}

/// Second-order graph: the same construction on the rows of `w`.
pub fn naive_second_order(w: &DMatrix<f64>, k: usize) -> Option<DMatrix<f64>> {
    let n = w.nrows();
    let rows = DMatrix::from_fn(n, n, |r, c| w[(c, r)]);
    naive_kernel_graph(&rows, k)
}

pub fn naive_fuse(firsts: &[DMatrix<f64>], seconds: Option<&[DMatrix<f64>]>) -> DMatrix<f64> {
    let n = firsts[0].nrows();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut a = 1.0;
            for g in firsts {
                a *= g[(i, j)];
            }
            out[(i, j)] = a;
            if let Some(seconds) = seconds {
                let mut b = 1.0;
                for g in seconds {
                    b *= g[(i, j)];
                }
                out[(i, j)] += b;
            }
        }
    }
    out
}

/// `1/2 * sum_ij W_ij |C_i - C_j|^2` over rows of `C`.
pub fn naive_row_smoothness(w: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let n = w.nrows();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut d = 0.0;
            for col in 0..c.ncols() {
                let diff = c[(i, col)] - c[(j, col)];
                d += diff * diff;
            }
            total += w[(i, j)] * d;
        }
    }
    0.5 * total
}

/// `(L^T + L) C` with explicit triple loops.
pub fn naive_sym_product(l: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut out = DMatrix::zeros(n, c.ncols());
    for i in 0..n {
        for j in 0..c.ncols() {
            let mut s = 0.0;
            for r in 0..n {
                s += (l[(r, i)] + l[(i, r)]) * c[(r, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Metrics

/// Best accuracy over every one-to-one relabeling of `pred`, by exhaustive
/// search over permutations.
pub fn brute_force_accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    let size = pred.iter().chain(truth).max().map_or(0, |m| m + 1);
    let mut perm: Vec<usize> = (0..size).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let hits = pred.iter().zip(truth).filter(|&(&a, &b)| p[a] == b).count();
        best = best.max(hits);
    });
    best as f64 / pred.len() as f64
}

fn permute(v: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == v.len() {
        visit(v);
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permute(v, start + 1, visit);
        v.swap(start, i);
    }
}

/// (together in both, together only in pred, together only in truth,
/// apart in both) by enumerating all pairs.
pub fn pair_enumeration(pred: &[usize], truth: &[usize]) -> (u64, u64, u64, u64) {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for i in 0..pred.len() {
        for j in i + 1..pred.len() {
            match (pred[i] == pred[j], truth[i] == truth[j]) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => tn += 1,
            }
        }
    }
    (tp, fp, fn_, tn)
}

pub fn oracle_rand_index(pred: &[usize], truth: &[usize]) -> f64 {
    let (tp, fp, fn_, tn) = pair_enumeration(pred, truth);
    (tp + tn) as f64 / (tp + fp + fn_ + tn) as f64
}

pub fn oracle_f_measure(pred: &[usize], truth: &[usize]) -> f64 {
    let (tp, fp, fn_, _) = pair_enumeration(pred, truth);
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Applies a random permutation of cluster ids.
pub fn relabel(labels: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let size = labels.iter().max().map_or(0, |m| m + 1);
    let mut ids: Vec<usize> = (0..size).collect();
    ids.shuffle(rng);
    labels.iter().map(|&l| ids[l]).collect()
}

pub fn random_labels(rng: &mut impl Rng, n: usize, c: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..c)).collect()
}

// ---------------------------------------------------------------------------
// Spectral

/// Block-diagonal affinity with `sizes` blocks of positive entries, rows and
/// columns shuffled; returns the affinity and the block of each sample.
pub fn shuffled_blocks(rng: &mut impl Rng, sizes: &[usize]) -> (DMatrix<f64>, Vec<usize>) {
    let n: usize = sizes.iter().sum();
    let mut labels = Vec::with_capacity(n);
    for (b, &s) in sizes.iter().enumerate() {
        labels.extend(std::iter::repeat_n(b, s));
    }
    labels.shuffle(rng);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            if labels[i] == labels[j] {
                let v = rng.random_range(0.2..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
    }
    (a, labels)
}
