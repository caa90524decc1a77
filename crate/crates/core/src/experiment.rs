//! End-to-end experiments: load or synthesize data, train, cluster, evaluate,
//! and write versioned reports. Also parameter sweeps and gradient checks.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{generate_synthetic, load_manifest, DatasetError, MultiViewDataset, SyntheticSpec};
use crate::graph::{GraphDiagnostics, GraphLaplacian};
use crate::metrics::{evaluate, MetricError, MetricReport};
use crate::network::{forward, init_network, widths_from_encoder, LossBreakdown};
use crate::seeded_rng;
use crate::spectral::{cluster, SpectralError};
use crate::training::{
    backward, compare_gradients, finite_difference_grad, train, BlockDiscrepancy, Gradients,
    TrainConfig, TrainError, TrainOutcome,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("load stage: {0}")]
    Load(#[source] DatasetError),
    #[error("train stage: {0}")]
    Train(#[source] TrainError),
    #[error("cluster stage: {0}")]
    Cluster(#[source] SpectralError),
    #[error("evaluate stage: {0}")]
    Evaluate(#[source] MetricError),
    #[error("report stage: cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("report stage: cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
}

impl ExperimentError {
    pub fn stage(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Load(_) => "load",
            Self::Train(_) => "train",
            Self::Cluster(_) => "cluster",
            Self::Evaluate(_) => "evaluate",
            Self::Write { .. } | Self::Read { .. } => "report",
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataSource {
    Manifest(PathBuf),
    Synthetic(SyntheticSpec),
}

impl DataSource {
    pub fn load(&self) -> std::result::Result<MultiViewDataset, DatasetError> {
        match self {
            Self::Manifest(path) => load_manifest(path),
            Self::Synthetic(spec) => generate_synthetic(spec),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data: DataSource,
    pub train: TrainConfig,
    /// Cluster count; taken from the ground-truth labels when absent.
    pub clusters: Option<usize>,
    pub repeats: usize,
    pub kmeans_restarts: usize,
    /// Retrain with seed `train.seed + r` for every repeat instead of
    /// training once and varying only the k-means seed.
    pub retrain_per_repeat: bool,
    /// Wall-clock stage timings make reports non-reproducible, so they are
    /// opt-in.
    pub record_timings: bool,
}

impl ExperimentConfig {
    pub fn new(data: DataSource) -> Self {
        Self {
            data,
            train: TrainConfig::default(),
            clusters: None,
            repeats: 1,
            kmeans_restarts: 20,
            retrain_per_repeat: false,
            record_timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub samples: usize,
    pub view_dims: Vec<usize>,
    pub clusters: usize,
    pub has_labels: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRun {
    pub seed: u64,
    pub pretrain_history: Vec<f64>,
    pub loss_history: Vec<LossBreakdown>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatResult {
    pub repeat: usize,
    pub train_seed: u64,
    pub kmeans_seed: u64,
    pub labels: Vec<usize>,
    pub wcss: f64,
    pub metrics: Option<MetricReport>,
}

/// Mean and population standard deviation of each metric over repeats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: MetricReport,
    pub std: MetricReport,
}

impl MetricSummary {
    pub fn from_reports(reports: &[MetricReport]) -> Option<Self> {
        if reports.is_empty() {
            return None;
        }
        let count = reports.len() as f64;
        let column = |i: usize| reports.iter().map(move |r| r.values()[i]);
        let mean: Vec<f64> = (0..4).map(|i| column(i).sum::<f64>() / count).collect();
        let std: Vec<f64> = (0..4)
            .map(|i| (column(i).map(|v| (v - mean[i]).powi(2)).sum::<f64>() / count).sqrt())
            .collect();
        let pack = |v: &[f64]| MetricReport {
            nmi: v[0],
            acc: v[1],
            f_measure: v[2],
            rand_index: v[3],
        };
        Some(Self {
            mean: pack(&mean),
            std: pack(&std),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub load: f64,
    pub train: f64,
    pub cluster: f64,
    pub evaluate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub repeat_policy: String,
    pub graph: GraphDiagnostics,
    pub training: Vec<TrainingRun>,
    pub repeats: Vec<RepeatResult>,
    pub summary: Option<MetricSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimings>,
}

struct Stopwatch(Option<std::time::Instant>);

impl Stopwatch {
    fn start(enabled: bool) -> Self {
        Self(enabled.then(std::time::Instant::now))
    }

    fn lap(&mut self) -> f64 {
        match &mut self.0 {
            Some(t) => {
                let s = t.elapsed().as_secs_f64();
                *t = std::time::Instant::now();
                s
            }
            None => 0.0,
        }
    }
}

/// Runs the full pipeline `config.repeats` times and returns the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ClusteringReport> {
    let data = config.data.load().map_err(ExperimentError::Load)?;
    run_on(config, &data)
}

/// [`run_experiment`] on an already loaded dataset; `config.data` is only
/// echoed.
pub fn run_on(config: &ExperimentConfig, data: &MultiViewDataset) -> Result<ClusteringReport> {
    if config.repeats == 0 {
        return Err(ExperimentError::Config("repeats must be at least 1".into()));
    }
    let clusters = config
        .clusters
        .or_else(|| data.n_clusters())
        .ok_or_else(|| ExperimentError::Config("cluster count not given and data has no labels".into()))?;

    let mut watch = Stopwatch::start(config.record_timings);
    let mut timings = StageTimings {
        load: watch.lap(),
        ..StageTimings::default()
    };

    let train_once = |seed: u64| -> Result<TrainOutcome> {
        let train_config = TrainConfig {
            seed,
            ..config.train.clone()
        };
        train(&train_config, data).map_err(ExperimentError::Train)
    };

    let mut training = Vec::new();
    let mut repeats = Vec::with_capacity(config.repeats);
    let mut current: Option<TrainOutcome> = None;
    let mut graph = None;
    for r in 0..config.repeats {
        let train_seed = if config.retrain_per_repeat {
            config.train.seed + r as u64
        } else {
            config.train.seed
        };
        if current.is_none() || config.retrain_per_repeat {
            let outcome = train_once(train_seed)?;
            training.push(TrainingRun {
                seed: train_seed,
                pretrain_history: outcome.pretrain_history.clone(),
                loss_history: outcome.history.clone(),
            });
            graph.get_or_insert_with(|| outcome.graph.diagnostics());
            current = Some(outcome);
        }
        timings.train += watch.lap();

        let state = &current.as_ref().expect("trained").state;
        let kmeans_seed = config.train.seed + r as u64;
        let assignment = cluster(&state.coefficients, clusters, config.kmeans_restarts, kmeans_seed)
            .map_err(ExperimentError::Cluster)?;
        timings.cluster += watch.lap();

        let metrics = data
            .labels()
            .map(|truth| evaluate(&assignment.labels, truth))
            .transpose()
            .map_err(ExperimentError::Evaluate)?;
        timings.evaluate += watch.lap();

        repeats.push(RepeatResult {
            repeat: r + 1,
            train_seed,
            kmeans_seed,
            labels: assignment.labels,
            wcss: assignment.wcss,
            metrics,
        });
    }

    let metric_list: Vec<MetricReport> = repeats.iter().filter_map(|r| r.metrics).collect();
    Ok(ClusteringReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        dataset: DatasetSummary {
            name: data.name().to_string(),
            samples: data.n_samples(),
            view_dims: data.view_dims(),
            clusters,
            has_labels: data.labels().is_some(),
        },
        repeat_policy: if config.retrain_per_repeat {
            "retrain with seed + r, k-means seed + r".into()
        } else {
            "train once, k-means seed + r".into()
        },
        graph: graph.expect("at least one training run"),
        training,
        repeats,
        summary: MetricSummary::from_reports(&metric_list),
        timings: config.record_timings.then_some(timings),
    })
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    pub summary: Option<MetricSummary>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub base_config: ExperimentConfig,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub ks: Vec<usize>,
    /// Cells ordered by k, then alpha, then beta.
    pub cells: Vec<SweepCell>,
    /// Mean NMI indexed `[k][alpha][beta]`; `None` where the cell failed.
    pub nmi: Vec<Vec<Vec<Option<f64>>>>,
    /// Mean accuracy indexed like `nmi`.
    pub acc: Vec<Vec<Vec<Option<f64>>>>,
}

impl SweepReport {
    pub fn cell(&self, alpha_index: usize, beta_index: usize, k_index: usize) -> &SweepCell {
        let (na, nb) = (self.alphas.len(), self.betas.len());
        &self.cells[(k_index * na + alpha_index) * nb + beta_index]
    }
}

/// The alpha/beta grid `{0.001, 0.01, ..., 10000}`.
pub fn default_tradeoff_grid() -> Vec<f64> {
    vec![0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0]
}

/// Runs one experiment per `(k, alpha, beta)` grid point. Failing cells keep
/// their error message and the sweep continues.
pub fn sweep(config: &ExperimentConfig, alphas: &[f64], betas: &[f64], ks: &[usize]) -> Result<SweepReport> {
    if alphas.is_empty() || betas.is_empty() || ks.is_empty() {
        return Err(ExperimentError::Config("sweep value sets must be nonempty".into()));
    }
    let data = config.data.load().map_err(ExperimentError::Load)?;
    let mut cells = Vec::with_capacity(alphas.len() * betas.len() * ks.len());
    for &k in ks {
        for &alpha in alphas {
            for &beta in betas {
                let mut cfg = config.clone();
                cfg.train.alpha = alpha;
                cfg.train.beta = beta;
                cfg.train.k = k;
                let (summary, error) = match run_on(&cfg, &data) {
                    Ok(report) => (report.summary, None),
                    Err(e) => {
                        log::warn!("sweep cell alpha={alpha} beta={beta} k={k} failed: {e}");
                        (None, Some(e.to_string()))
                    }
                };
                cells.push(SweepCell {
                    alpha,
                    beta,
                    k,
                    summary,
                    error,
                });
            }
        }
    }
    let grid = |pick: fn(&MetricReport) -> f64| {
        let mut it = cells.iter();
        ks.iter()
            .map(|_| {
                alphas
                    .iter()
                    .map(|_| {
                        betas
                            .iter()
                            .map(|_| it.next().and_then(|c| c.summary.map(|s| pick(&s.mean))))
                            .collect()
                    })
                    .collect()
            })
            .collect()
    };
    let nmi = grid(|m| m.nmi);
    let acc = grid(|m| m.acc);
    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        base_config: config.clone(),
        alphas: alphas.to_vec(),
        betas: betas.to_vec(),
        ks: ks.to_vec(),
        cells,
        nmi,
        acc,
    })
}

// ---------------------------------------------------------------------------
// Gradient check

/// Size of the random instance used by [`gradcheck`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradcheckDims {
    pub samples: usize,
    pub view_dims: Vec<usize>,
    /// Encoder widths; the decoder mirrors them (`M = 2 * len`).
    pub encoder: Vec<usize>,
    pub alpha: f64,
    pub beta: f64,
    pub step: f64,
}

impl Default for GradcheckDims {
    fn default() -> Self {
        Self {
            samples: 12,
            view_dims: vec![5, 4],
            encoder: vec![4, 3, 2],
            alpha: 0.1,
            beta: 100.0,
            step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradcheckReport {
    pub schema_version: u32,
    pub dims: GradcheckDims,
    pub seed: u64,
    pub tolerance: f64,
    /// Entries smaller than this are compared absolutely.
    pub absolute_floor: f64,
    pub blocks: Vec<BlockDiscrepancy>,
    pub failed: Vec<String>,
    pub passed: bool,
}

pub const GRADCHECK_FLOOR: f64 = 1e-8;

/// A random problem instance: data, Laplacian of a random symmetric graph,
/// and a network with nonzero biases and a dense `C`.
pub fn random_instance(
    dims: &GradcheckDims,
    seed: u64,
) -> std::result::Result<(MultiViewDataset, GraphLaplacian, crate::network::NetworkState), TrainError> {
    let mut rng = seeded_rng(seed);
    let n = dims.samples;
    let views = dims
        .view_dims
        .iter()
        .map(|&d| DMatrix::from_fn(d, n, |_, _| rng.random_range(0.0..1.0)))
        .collect();
    let data = MultiViewDataset::new("gradcheck", views, None)?;
    let mut w = DMatrix::from_fn(n, n, |_, _| rng.random_range(0.0..1.0));
    w = (&w + w.transpose()) * 0.5;
    w.fill_diagonal(0.0);
    let laplacian = GraphLaplacian::from_weights(&w);
    let widths: Vec<Vec<usize>> = dims
        .view_dims
        .iter()
        .map(|&d| widths_from_encoder(d, &dims.encoder))
        .collect();
    let mut state = init_network(&widths, n, rng.random())?;
    for layers in &mut state.views {
        for l in layers.iter_mut() {
            l.bias.iter_mut().for_each(|b| *b = rng.random_range(-0.1..0.1));
        }
    }
    state
        .coefficients
        .iter_mut()
        .for_each(|c| *c = rng.random_range(-0.1..0.1));
    Ok((data, laplacian, state))
}

pub fn gradcheck(dims: &GradcheckDims, seed: u64, tolerance: f64) -> std::result::Result<GradcheckReport, TrainError> {
    gradcheck_with(dims, seed, tolerance, |_| {})
}

/// [`gradcheck`] with a hook that may alter the analytic gradient before
/// comparison (fault injection).
pub fn gradcheck_with(
    dims: &GradcheckDims,
    seed: u64,
    tolerance: f64,
    tamper: impl FnOnce(&mut Gradients),
) -> std::result::Result<GradcheckReport, TrainError> {
    let (data, laplacian, state) = random_instance(dims, seed)?;
    let cache = forward(&state, &data)?;
    let mut analytic = backward(&state, &data, &laplacian, dims.alpha, dims.beta, &cache)?;
    tamper(&mut analytic);
    let numeric = finite_difference_grad(&state, &data, &laplacian, dims.alpha, dims.beta, dims.step)?;
    let blocks = compare_gradients(&analytic, &numeric, GRADCHECK_FLOOR);
    let failed: Vec<String> = blocks
        .iter()
        .filter(|b| !b.passes(tolerance, GRADCHECK_FLOOR))
        .map(|b| b.name.clone())
        .collect();
    Ok(GradcheckReport {
        schema_version: SCHEMA_VERSION,
        dims: dims.clone(),
        seed,
        tolerance,
        absolute_floor: GRADCHECK_FLOOR,
        blocks,
        passed: failed.is_empty(),
        failed,
    })
}

// ---------------------------------------------------------------------------
// Report output

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    /// The full report as pretty-printed JSON.
    #[default]
    Structured,
    /// One row per repeat plus a `mean(std)` row.
    CsvSummary,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "structured" | "json" => Ok(Self::Structured),
            "csv-summary" | "csv" => Ok(Self::CsvSummary),
            other => Err(format!("unknown report format {other:?} (expected structured or csv-summary)")),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn csv_summary(report: &ClusteringReport) -> String {
    let fmt = |m: Option<MetricReport>| match m {
        Some(m) => m.values().map(|v| v.to_string()).join(","),
        None => ",,,".to_string(),
    };
    let mut out = String::from("repeat,nmi,acc,f_measure,rand_index,wcss\n");
    for r in &report.repeats {
        out.push_str(&format!("{},{},{}\n", r.repeat, fmt(r.metrics), r.wcss));
    }
    let summary = match &report.summary {
        Some(s) => s
            .mean
            .values()
            .iter()
            .zip(s.std.values())
            .map(|(m, sd)| format!("{m} ({sd})"))
            .collect::<Vec<_>>()
            .join(","),
        None => ",,,".to_string(),
    };
    out.push_str(&format!("mean(std),{summary},\n"));
    out
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so a failed write leaves nothing behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let err = |source| ExperimentError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

pub fn emit_report(report: &ClusteringReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Structured => to_json(report),
        ReportFormat::CsvSummary => csv_summary(report),
    };
    write_atomic(path, &text)
}

pub fn read_report(path: &Path) -> Result<ClusteringReport> {
    let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| ExperimentError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(DataSource::Synthetic(SyntheticSpec {
            per_cluster: 15,
            ..SyntheticSpec::default()
        }));
        cfg.train.k = 5;
        cfg.train.pretrain_epochs = 20;
        cfg.train.epochs = 30;
        cfg.train.layers = Some(vec![8, 4]);
        cfg.kmeans_restarts = 3;
        cfg
    }

    #[test]
    fn single_repeat_report() {
        let report = run_experiment(&small_config()).unwrap();
        assert_eq!(report.schema_version, SCHEMA_VERSION);
        assert_eq!(report.repeats.len(), 1);
        assert_eq!(report.training.len(), 1);
        assert_eq!(report.training[0].loss_history.len(), 30);
        assert!(report.repeats[0].metrics.is_some());
        assert!(report.timings.is_none());
        assert_eq!(report.dataset.samples, 45);
    }

    #[test]
    fn repeats_vary_kmeans_seed_only() {
        let mut cfg = small_config();
        cfg.repeats = 3;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.training.len(), 1);
        let seeds: Vec<_> = report.repeats.iter().map(|r| (r.train_seed, r.kmeans_seed)).collect();
        assert_eq!(seeds, vec![(0, 0), (0, 1), (0, 2)]);
        let s = report.summary.unwrap();
        for i in 0..4 {
            let vals: Vec<f64> = report.repeats.iter().map(|r| r.metrics.unwrap().values()[i]).collect();
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(lo <= s.mean.values()[i] && s.mean.values()[i] <= hi);
        }

        cfg.retrain_per_repeat = true;
        cfg.repeats = 2;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.training.len(), 2);
        assert_eq!(report.training[1].seed, 1);
    }

    #[test]
    fn missing_manifest_is_a_load_error() {
        let cfg = ExperimentConfig::new(DataSource::Manifest("/no/such/manifest.json".into()));
        let err = run_experiment(&cfg).unwrap_err();
        assert_eq!(err.stage(), "load");
        assert!(err.to_string().starts_with("load stage"));
    }

    #[test]
    fn csv_summary_rows() {
        let mut cfg = small_config();
        cfg.repeats = 3;
        let report = run_experiment(&cfg).unwrap();
        let csv = csv_summary(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("mean(std),"));
    }

    #[test]
    fn report_round_trip_and_atomic_failure() {
        let report = run_experiment(&small_config()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        emit_report(&report, &path, ReportFormat::Structured).unwrap();
        assert_eq!(read_report(&path).unwrap(), report);

        let bad = dir.path().join("missing-dir").join("r.json");
        let err = emit_report(&report, &bad, ReportFormat::Structured).unwrap_err();
        assert_eq!(err.stage(), "report");
        assert!(!bad.exists());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn gradcheck_passes_and_detects_corruption() {
        let dims = GradcheckDims::default();
        let report = gradcheck(&dims, 3, 1e-5).unwrap();
        assert!(report.passed, "{:?}", report.blocks);
        assert_eq!(report, gradcheck(&dims, 3, 1e-5).unwrap());

        let bad = gradcheck_with(&dims, 3, 1e-5, |g| g.views[1][2].weight[(0, 0)] += 1e-3).unwrap();
        assert!(!bad.passed);
        assert_eq!(bad.failed, vec!["view2.layer3.weight".to_string()]);
    }

    #[test]
    fn degenerate_sweep_matches_single_run() {
        let cfg = small_config();
        let sweep_report = sweep(&cfg, &[0.1], &[100.0], &[5]).unwrap();
        let single = run_experiment(&cfg).unwrap();
        assert_eq!(sweep_report.cells.len(), 1);
        assert_eq!(sweep_report.cell(0, 0, 0).summary, single.summary);
        assert_eq!(sweep_report.nmi[0][0][0], single.summary.map(|s| s.mean.nmi));
        assert_eq!(default_tradeoff_grid().len(), 8);
    }

    #[test]
    fn failing_sweep_cells_are_recorded() {
        let cfg = small_config();
        // k = 50 exceeds n - 1 = 44
        let report = sweep(&cfg, &[0.1], &[1.0], &[5, 50]).unwrap();
        assert!(report.cells[0].error.is_none());
        assert!(report.cells[1].error.as_deref().unwrap().contains("train stage"));
        assert_eq!(report.nmi[1][0][0], None);
    }
}
