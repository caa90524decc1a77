//! Browser demo bindings. Each export takes and returns JSON strings so the
//! page needs no generated type glue beyond `wasm-bindgen`'s string passing.

use mscnlg::dataset::{generate_synthetic, MultiViewDataset, SyntheticSpec};
use mscnlg::experiment::{gradcheck, GradcheckDims};
use mscnlg::graph::{FusionMode, GraphDiagnostics, MultiViewGraph};
use mscnlg::metrics::{evaluate, MetricReport};
use mscnlg::spectral::{cluster, symmetrize_affinity};
use mscnlg::training::{train, TrainConfig};
use mscnlg::DMatrix;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Demo-sized data and training settings; every field has a default.
#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct DemoParams {
    pub clusters: usize,
    pub per_cluster: usize,
    pub view_dims: Vec<usize>,
    pub noise: f64,
    pub data_seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    pub fusion: FusionMode,
    pub epochs: usize,
    pub pretrain_epochs: usize,
    pub layers: Option<Vec<usize>>,
    pub seed: u64,
}

impl Default for DemoParams {
    fn default() -> Self {
        Self {
            clusters: 3,
            per_cluster: 30,
            view_dims: vec![20, 30],
            noise: 0.01,
            data_seed: 0,
            alpha: 0.1,
            beta: 100.0,
            k: 10,
            fusion: FusionMode::Both,
            epochs: 1500,
            pretrain_epochs: 300,
            layers: None,
            seed: 0,
        }
    }
}

impl DemoParams {
    fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            clusters: self.clusters,
            per_cluster: self.per_cluster,
            view_dims: self.view_dims.clone(),
            noise: self.noise,
            seed: self.data_seed,
            ..SyntheticSpec::default()
        }
    }

    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            alpha: self.alpha,
            beta: self.beta,
            k: self.k,
            fusion: self.fusion,
            epochs: self.epochs,
            pretrain_epochs: self.pretrain_epochs,
            layers: self.layers.clone(),
            seed: self.seed,
            ..TrainConfig::default()
        }
    }
}

/// Row-major `n x n` matrix for drawing.
#[derive(Debug, Serialize)]
pub struct Heatmap {
    pub n: usize,
    pub values: Vec<f64>,
}

impl From<&DMatrix<f64>> for Heatmap {
    fn from(m: &DMatrix<f64>) -> Self {
        Self {
            n: m.nrows(),
            values: m.transpose().as_slice().to_vec(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct GraphView {
    pub labels: Vec<usize>,
    pub view_dims: Vec<usize>,
    pub diagnostics: GraphDiagnostics,
    pub fused: Heatmap,
}

#[derive(Debug, Serialize)]
pub struct PipelineView {
    pub labels: Vec<usize>,
    pub predicted: Vec<usize>,
    pub metrics: MetricReport,
    pub pretrain_loss: Vec<f64>,
    pub loss: Vec<f64>,
    pub affinity: Heatmap,
    pub diagnostics: GraphDiagnostics,
}

fn parse(params: &str) -> Result<DemoParams, String> {
    if params.trim().is_empty() {
        return Ok(DemoParams::default());
    }
    serde_json::from_str(params).map_err(|e| format!("bad parameters: {e}"))
}

fn dataset(p: &DemoParams) -> Result<MultiViewDataset, String> {
    generate_synthetic(&p.spec()).map_err(|e| e.to_string())
}

fn json(value: &impl Serialize) -> String {
    serde_json::to_string(value).expect("demo outputs serialize")
}

/// Synthetic data and its fused graph.
pub fn graph_json(params: &str) -> Result<String, String> {
    let p = parse(params)?;
    let data = dataset(&p)?;
    let cfg = p.train_config();
    let normalized = data.normalized(cfg.normalize).map_err(|e| e.to_string())?;
    let graph = MultiViewGraph::build(normalized.views(), cfg.k, cfg.fusion).map_err(|e| e.to_string())?;
    Ok(json(&GraphView {
        labels: data.labels().unwrap_or_default().to_vec(),
        view_dims: data.view_dims(),
        diagnostics: graph.diagnostics(),
        fused: Heatmap::from(graph.fused.weights()),
    }))
}

/// Train, cluster and evaluate once on synthetic data.
pub fn pipeline_json(params: &str) -> Result<String, String> {
    let p = parse(params)?;
    let data = dataset(&p)?;
    let cfg = p.train_config();
    let outcome = train(&cfg, &data).map_err(|e| e.to_string())?;
    let assignment = cluster(&outcome.state.coefficients, p.clusters, 10, p.seed).map_err(|e| e.to_string())?;
    let labels = data.labels().unwrap_or_default().to_vec();
    let metrics = evaluate(&assignment.labels, &labels).map_err(|e| e.to_string())?;
    Ok(json(&PipelineView {
        metrics,
        labels,
        predicted: assignment.labels,
        loss: outcome.history.iter().map(|l| l.total).collect(),
        pretrain_loss: outcome.pretrain_history,
        affinity: Heatmap::from(symmetrize_affinity(&outcome.state.coefficients).matrix()),
        diagnostics: outcome.graph.diagnostics(),
    }))
}

/// Gradient check on a small random instance.
pub fn gradcheck_json(seed: u64, alpha: f64, beta: f64) -> Result<String, String> {
    let dims = GradcheckDims {
        alpha,
        beta,
        ..GradcheckDims::default()
    };
    gradcheck(&dims, seed, 1e-5).map(|r| json(&r)).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = buildGraph)]
pub fn build_graph(params: &str) -> Result<String, JsError> {
    graph_json(params).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = runPipeline)]
pub fn run_pipeline(params: &str) -> Result<String, JsError> {
    pipeline_json(params).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = checkGradients)]
pub fn check_gradients(seed: u32, alpha: f64, beta: f64) -> Result<String, JsError> {
    gradcheck_json(u64::from(seed), alpha, beta).map_err(|e| JsError::new(&e))
}
