//! Mutual-kNN proximity graphs, multi-view Hadamard fusion and the Laplacian
//! smoothness regularizer.
//!
//! A first-order graph links mutual k-nearest neighbours of a view with a
//! Gaussian kernel whose bandwidth is the median pairwise distance. A
//! second-order graph repeats the construction on the rows of a first-order
//! weight matrix, so samples sharing many neighbours end up close. Fusion
//! multiplies the graphs of all views entrywise, keeping only edges every view
//! agrees on.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("k = {k} is out of range for {n} samples (need 1 <= k <= n - 1)")]
    KOutOfRange { k: usize, n: usize },
    #[error("need at least 2 samples, found {0}")]
    TooFewPoints(usize),
    #[error("median pairwise distance is zero (all points identical); bandwidth is degenerate")]
    DegenerateBandwidth,
    #[error("no graphs to fuse")]
    Empty,
    #[error("graph is {found}x{found}, expected {expected}x{expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("{firsts} first-order graphs but {seconds} second-order graphs")]
    ViewCountMismatch { firsts: usize, seconds: usize },
    #[error("view {view}: {source}")]
    InView {
        view: usize,
        #[source]
        source: Box<GraphError>,
    },
}

pub type Result<T> = std::result::Result<T, GraphError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    FirstOrder,
    SecondOrder,
    Fused,
}

/// Which per-view graphs enter the fused graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionMode {
    /// Local (first-order) plus global (second-order) information.
    #[default]
    Both,
    /// First-order graphs only (the ablation variant).
    First,
}

impl std::str::FromStr for FusionMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "both" => Ok(Self::Both),
            "first" => Ok(Self::First),
            other => Err(format!("unknown fusion mode {other:?} (expected both or first)")),
        }
    }
}

/// Symmetric, nonnegative, zero-diagonal similarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityGraph {
    weights: DMatrix<f64>,
    kind: GraphKind,
    bandwidth: Option<f64>,
}

impl ProximityGraph {
    /// Wraps a weight matrix. Panics if it is not square.
    pub fn from_weights(weights: DMatrix<f64>, kind: GraphKind) -> Self {
        assert!(weights.is_square(), "graph weights must be square");
        Self {
            weights,
            kind,
            bandwidth: None,
        }
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    /// Kernel bandwidth used to build the graph (absent for fused graphs).
    pub fn bandwidth(&self) -> Option<f64> {
        self.bandwidth
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    /// Number of undirected edges with positive weight.
    pub fn edge_count(&self) -> usize {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.weights[(i, j)] > 0.0)
            .count()
    }

    /// Dense comma-separated export.
    pub fn to_csv(&self) -> String {
        crate::dataset::matrix_to_csv(&self.weights)
    }
}

/// `L = D - W` for the degree matrix `D` of `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphLaplacian {
    matrix: DMatrix<f64>,
}

impl GraphLaplacian {
    /// Laplacian of an arbitrary square weight matrix.
    pub fn from_weights(w: &DMatrix<f64>) -> Self {
        assert!(w.is_square(), "weights must be square");
        let mut matrix = -w.clone();
        for (i, row) in w.row_iter().enumerate() {
            matrix[(i, i)] += row.sum();
        }
        Self { matrix }
    }

    /// Uses `matrix` as given, without checking Laplacian structure.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        assert!(matrix.is_square(), "laplacian must be square");
        Self { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Squared Euclidean distances between the columns of `points`.
///
/// Formed from explicit coordinate differences, so every entry is a sum of
/// squares and never negative; the diagonal is exactly zero.
pub fn pairwise_sqdist(points: &DMatrix<f64>) -> DMatrix<f64> {
    let n = points.ncols();
    let mut d = DMatrix::zeros(n, n);
    for j in 0..n {
        let pj = points.column(j);
        for i in 0..j {
            let pi = points.column(i);
            let s: f64 = pi.iter().zip(pj.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            d[(i, j)] = s;
            d[(j, i)] = s;
        }
    }
    d
}

/// Median of the off-diagonal pairwise Euclidean distances.
pub fn median_bandwidth(sqdist: &DMatrix<f64>) -> Result<f64> {
    let n = sqdist.nrows();
    if n < 2 {
        return Err(GraphError::TooFewPoints(n));
    }
    let mut dists: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| sqdist[(i, j)].max(0.0).sqrt())
        .collect();
    dists.sort_by(f64::total_cmp);
    let m = dists.len();
    let median = if m % 2 == 1 {
        dists[m / 2]
    } else {
        0.5 * (dists[m / 2 - 1] + dists[m / 2])
    };
    if median > 0.0 {
        Ok(median)
    } else {
        Err(GraphError::DegenerateBandwidth)
    }
}

/// `mask(i, j)` is true when `j` is among the `k` nearest neighbours of `i`
/// and vice versa. A point is never its own neighbour; equal distances are
/// ordered by ascending sample index.
pub fn mutual_knn_mask(sqdist: &DMatrix<f64>, k: usize) -> Result<DMatrix<bool>> {
    let n = sqdist.nrows();
    if k == 0 || k >= n {
        return Err(GraphError::KOutOfRange { k, n });
    }
    let mut knn = DMatrix::from_element(n, n, false);
    let mut order: Vec<usize> = Vec::with_capacity(n - 1);
    for i in 0..n {
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        order.sort_by(|&a, &b| {
            sqdist[(i, a)]
                .total_cmp(&sqdist[(i, b)])
                .then(a.cmp(&b))
        });
        for &j in &order[..k] {
            knn[(i, j)] = true;
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| knn[(i, j)] && knn[(j, i)]))
}

fn kernel_graph(points: &DMatrix<f64>, k: usize, kind: GraphKind) -> Result<ProximityGraph> {
    let sqdist = pairwise_sqdist(points);
    let mask = mutual_knn_mask(&sqdist, k)?;
    let sigma = median_bandwidth(&sqdist)?;
    let s2 = sigma * sigma;
    let n = points.ncols();
    let weights = DMatrix::from_fn(n, n, |i, j| {
        if mask[(i, j)] {
            (-sqdist[(i, j)] / s2).exp()
        } else {
            0.0
        }
    });
    Ok(ProximityGraph {
        weights,
        kind,
        bandwidth: Some(sigma),
    })
}

/// Gaussian-kernel mutual-kNN graph over the columns of a view.
pub fn first_order_proximity(view: &DMatrix<f64>, k: usize) -> Result<ProximityGraph> {
    kernel_graph(view, k, GraphKind::FirstOrder)
}

/// Mutual-kNN graph over the neighbourhood profiles (rows) of `first`, with
/// its own median bandwidth.
pub fn second_order_proximity(first: &ProximityGraph, k: usize) -> Result<ProximityGraph> {
    kernel_graph(&first.weights.transpose(), k, GraphKind::SecondOrder)
}

fn hadamard(graphs: &[ProximityGraph], n: usize) -> Result<DMatrix<f64>> {
    let (head, tail) = graphs.split_first().ok_or(GraphError::Empty)?;
    let mut out = head.weights.clone();
    if out.nrows() != n {
        return Err(GraphError::ShapeMismatch {
            expected: n,
            found: out.nrows(),
        });
    }
    for g in tail {
        if g.n() != n {
            return Err(GraphError::ShapeMismatch {
                expected: n,
                found: g.n(),
            });
        }
        out.component_mul_assign(&g.weights);
    }
    Ok(out)
}

/// Entrywise product of the first-order graphs across views, plus (for
/// [`FusionMode::Both`]) the entrywise product of the second-order graphs.
///
/// The result can reach 2 where both products are 1. A warning is logged when
/// fewer than `n` edges survive.
pub fn fuse_graphs(
    firsts: &[ProximityGraph],
    seconds: &[ProximityGraph],
    mode: FusionMode,
) -> Result<ProximityGraph> {
    let n = firsts.first().ok_or(GraphError::Empty)?.n();
    let mut weights = hadamard(firsts, n)?;
    if mode == FusionMode::Both {
        if seconds.len() != firsts.len() {
            return Err(GraphError::ViewCountMismatch {
                firsts: firsts.len(),
                seconds: seconds.len(),
            });
        }
        weights += hadamard(seconds, n)?;
    }
    let fused = ProximityGraph {
        weights,
        kind: GraphKind::Fused,
        bandwidth: None,
    };
    let edges = fused.edge_count();
    if edges < n {
        log::warn!("fused graph keeps only {edges} edges for {n} samples; graph term is nearly inactive");
    }
    Ok(fused)
}

pub fn laplacian(graph: &ProximityGraph) -> GraphLaplacian {
    GraphLaplacian::from_weights(&graph.weights)
}

/// `Tr(C^T L C)`, the smoothness penalty on the rows of `C`.
///
/// For a Laplacian built from symmetric `W` this equals
/// `1/2 * sum_ij W_ij * |C_i. - C_j.|^2` over rows of `C`.
pub fn graph_regularizer(c: &DMatrix<f64>, l: &GraphLaplacian) -> f64 {
    assert_eq!(l.n(), c.nrows(), "laplacian and coefficient shapes disagree");
    (l.matrix() * c).dot(c)
}

/// Per-view bandwidths and edge counts, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDiagnostics {
    pub views: Vec<ViewGraphStats>,
    pub fused_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewGraphStats {
    pub first_order_bandwidth: f64,
    pub first_order_edges: usize,
    pub second_order_bandwidth: Option<f64>,
    pub second_order_edges: Option<usize>,
}

/// All graphs of a dataset: per-view first/second order, fused, and `L`.
#[derive(Debug, Clone)]
pub struct MultiViewGraph {
    pub firsts: Vec<ProximityGraph>,
    pub seconds: Vec<ProximityGraph>,
    pub fused: ProximityGraph,
    pub laplacian: GraphLaplacian,
}

impl MultiViewGraph {
    pub fn build(views: &[DMatrix<f64>], k: usize, mode: FusionMode) -> Result<Self> {
        let in_view = |view: usize| move |e| GraphError::InView {
            view: view + 1,
            source: Box::new(e),
        };
        let firsts = views
            .iter()
            .enumerate()
            .map(|(v, x)| first_order_proximity(x, k).map_err(in_view(v)))
            .collect::<Result<Vec<_>>>()?;
        let seconds = match mode {
            FusionMode::Both => firsts
                .iter()
                .enumerate()
                .map(|(v, w)| second_order_proximity(w, k).map_err(in_view(v)))
                .collect::<Result<Vec<_>>>()?,
            FusionMode::First => Vec::new(),
        };
        let fused = fuse_graphs(&firsts, &seconds, mode)?;
        let laplacian = laplacian(&fused);
        Ok(Self {
            firsts,
            seconds,
            fused,
            laplacian,
        })
    }

    pub fn diagnostics(&self) -> GraphDiagnostics {
        let views = self
            .firsts
            .iter()
            .enumerate()
            .map(|(v, w)| ViewGraphStats {
                first_order_bandwidth: w.bandwidth.unwrap_or(0.0),
                first_order_edges: w.edge_count(),
                second_order_bandwidth: self.seconds.get(v).and_then(|s| s.bandwidth),
                second_order_edges: self.seconds.get(v).map(ProximityGraph::edge_count),
            })
            .collect();
        GraphDiagnostics {
            views,
            fused_edges: self.fused.edge_count(),
        }
    }
}
