//! External clustering metrics: NMI, ACC, pairwise F-measure, Rand index,
//! and the average rank used to summarize comparison tables.
//!
//! Label values are arbitrary ids; only the partition they induce matters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("{pred} predicted labels but {truth} ground-truth labels")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("score table is empty")]
    EmptyTable,
    #[error("score table row {row} has {found} entries, expected {expected}")]
    RaggedTable {
        row: usize,
        expected: usize,
        found: usize,
    },
}

pub type Result<T> = std::result::Result<T, MetricError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub nmi: f64,
    pub acc: f64,
    pub f_measure: f64,
    pub rand_index: f64,
}

impl MetricReport {
    /// Values in table order: NMI, ACC, F-measure, RI.
    pub fn values(&self) -> [f64; 4] {
        [self.nmi, self.acc, self.f_measure, self.rand_index]
    }

    pub const NAMES: [&'static str; 4] = ["nmi", "acc", "f_measure", "rand_index"];
}

pub fn evaluate(pred: &[usize], truth: &[usize]) -> Result<MetricReport> {
    Ok(MetricReport {
        nmi: nmi(pred, truth)?,
        acc: accuracy(pred, truth)?,
        f_measure: f_measure(pred, truth)?,
        rand_index: rand_index(pred, truth)?,
    })
}

/// Contingency table with rows indexed by predicted cluster and columns by
/// true cluster (both compacted to `0..k` in ascending id order).
struct Contingency {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut ids = labels.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let mapped = labels
        .iter()
        .map(|l| ids.binary_search(l).expect("id present"))
        .collect();
    (mapped, ids.len())
}

fn contingency(pred: &[usize], truth: &[usize], min_n: usize) -> Result<Contingency> {
    if pred.len() != truth.len() {
        return Err(MetricError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.len() < min_n {
        return Err(MetricError::TooFewSamples {
            needed: min_n,
            found: pred.len(),
        });
    }
    let (p, rows) = compact(pred);
    let (t, cols) = compact(truth);
    let mut counts = vec![vec![0u64; cols]; rows];
    for (&i, &j) in p.iter().zip(&t) {
        counts[i][j] += 1;
    }
    let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
    let col_sums = (0..cols).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
    Ok(Contingency {
        counts,
        row_sums,
        col_sums,
        n: pred.len() as u64,
    })
}

/// Best-match accuracy: the largest fraction of samples that agree under a
/// one-to-one mapping of predicted to true clusters.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = contingency(pred, truth, 1)?;
    let size = table.row_sums.len().max(table.col_sums.len());
    let mut gain = vec![vec![0i64; size]; size];
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            gain[i][j] = v as i64;
        }
    }
    let matched = max_weight_assignment(&gain);
    Ok(matched as f64 / table.n as f64)
}

/// Hungarian algorithm (shortest augmenting paths with potentials) on a
/// square gain matrix; returns the maximum total gain of a perfect matching.
fn max_weight_assignment(gain: &[Vec<i64>]) -> i64 {
    let n = gain.len();
    let top = gain.iter().flatten().copied().max().unwrap_or(0);
    // Minimize cost = top - gain. Arrays are 1-based; index 0 is a sentinel.
    let cost = |i: usize, j: usize| top - gain[i - 1][j - 1];
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
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
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| gain[matched_row[j] - 1][j - 1]).sum()
}

fn entropy(sums: &[u64], n: f64) -> f64 {
    sums.iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information over the geometric mean of the two entropies. Two
/// single-cluster partitions score 1; a single-cluster partition against a
/// nontrivial one scores 0.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let t = contingency(pred, truth, 1)?;
    let n = t.n as f64;
    let hp = entropy(&t.row_sums, n);
    let ht = entropy(&t.col_sums, n);
    if hp == 0.0 && ht == 0.0 {
        return Ok(1.0);
    }
    if hp == 0.0 || ht == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let nij = nij as f64;
                mi += nij / n * (n * nij / (t.row_sums[i] as f64 * t.col_sums[j] as f64)).ln();
            }
        }
    }
    Ok((mi / (hp * ht).sqrt()).clamp(0.0, 1.0))
}

fn pairs(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Pair counts: together in both, together in `pred`, together in `truth`, all pairs.
fn pair_counts(t: &Contingency) -> (u64, u64, u64, u64) {
    let both = t.counts.iter().flatten().map(|&c| pairs(c)).sum();
    let pred = t.row_sums.iter().map(|&c| pairs(c)).sum();
    let truth = t.col_sums.iter().map(|&c| pairs(c)).sum();
    (both, pred, truth, pairs(t.n))
}

/// Fraction of sample pairs on which the partitions agree (both together or
/// both apart).
pub fn rand_index(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let (both, p, t, total) = pair_counts(&contingency(pred, truth, 2)?);
    let agree = total + 2 * both - p - t;
    Ok(agree as f64 / total as f64)
}

/// Pairwise F1 over same-cluster pairs. Zero when no pair is together in
/// both partitions.
pub fn f_measure(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let (tp, p, t, _) = pair_counts(&contingency(pred, truth, 2)?);
    Ok(pairwise_f1(tp, p - tp, t - tp))
}

pub(crate) fn pairwise_f1(tp: u64, fp: u64, fn_: u64) -> f64 {
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Mean rank per method (row) over metrics (columns), ranking higher scores
/// first and giving tied methods the mean of their positions.
pub fn average_rank(table: &[Vec<f64>]) -> Result<Vec<f64>> {
    let methods = table.len();
    let metrics = table.first().ok_or(MetricError::EmptyTable)?.len();
    if metrics == 0 {
        return Err(MetricError::EmptyTable);
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != metrics {
            return Err(MetricError::RaggedTable {
                row,
                expected: metrics,
                found: r.len(),
            });
        }
    }
    let mut totals = vec![0.0; methods];
    for col in 0..metrics {
        let mut order: Vec<usize> = (0..methods).collect();
        order.sort_by(|&a, &b| table[b][col].total_cmp(&table[a][col]));
        let mut start = 0;
        while start < methods {
            let mut end = start + 1;
            while end < methods && table[order[end]][col] == table[order[start]][col] {
                end += 1;
            }
            // positions start+1 ..= end share their mean
            let rank = (start + 1 + end) as f64 / 2.0;
            for &m in &order[start..end] {
                totals[m] += rank;
            }
            start = end;
        }
    }
    Ok(totals.into_iter().map(|t| t / metrics as f64).collect())
}
