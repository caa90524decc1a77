//! Per-view autoencoders joined by a shared self-expressive coefficient
//! matrix `C`.
//!
//! View `k` is encoded by layers `1..=M/2` into a latent matrix `Z_k`
//! (`d̂_k x n`) and decoded by layers `M/2+1..=M` back to `X̃_k`. Hidden layers
//! use `tanh`; the final decoder layer is linear. The self-expression term asks
//! `Z_k ≈ Z_k C` for every view with the same `C`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::MultiViewDataset;
use crate::graph::{graph_regularizer, GraphLaplacian};
use crate::seeded_rng;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("invalid layer widths for view {view}: {reason}")]
    InvalidWidths { view: usize, reason: String },
    #[error("network has {network} views, data has {data}")]
    ViewCountMismatch { network: usize, data: usize },
    #[error("view {view}: network expects {expected} input features, data has {found}")]
    InputDimMismatch {
        view: usize,
        expected: usize,
        found: usize,
    },
    #[error("coefficient matrix is {found}x{found}, data has {expected} samples")]
    SampleCountMismatch { expected: usize, found: usize },
    #[error("view {view}, layer {layer}: activation is not finite")]
    NonFinite { view: usize, layer: usize },
}

pub type Result<T> = std::result::Result<T, NetworkError>;

pub(crate) fn activation(y: f64) -> f64 {
    y.tanh()
}

/// Derivative of `tanh` expressed through its output.
pub(crate) fn activation_slope(f: f64) -> f64 {
    1.0 - f * f
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    /// `out x in`
    pub weight: DMatrix<f64>,
    pub bias: DVector<f64>,
}

impl LayerParams {
    pub fn zeros(input: usize, output: usize) -> Self {
        Self {
            weight: DMatrix::zeros(output, input),
            bias: DVector::zeros(output),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weight.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weight.nrows()
    }
}

/// Autoencoder parameters of every view plus the shared `n x n` matrix `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub views: Vec<Vec<LayerParams>>,
    pub coefficients: DMatrix<f64>,
}

impl NetworkState {
    /// Layers per view (`M`).
    pub fn depth(&self) -> usize {
        self.views[0].len()
    }

    /// 1-based index of the latent layer, `M/2`.
    pub fn latent_layer(&self) -> usize {
        self.depth() / 2
    }

    pub fn widths(&self) -> Vec<Vec<usize>> {
        self.views
            .iter()
            .map(|layers| {
                std::iter::once(layers[0].input_dim())
                    .chain(layers.iter().map(LayerParams::output_dim))
                    .collect()
            })
            .collect()
    }

    /// A state with the same shapes and every entry zero.
    pub fn zeros_like(&self) -> Self {
        Self {
            views: self
                .views
                .iter()
                .map(|layers| {
                    layers
                        .iter()
                        .map(|l| LayerParams::zeros(l.input_dim(), l.output_dim()))
                        .collect()
                })
                .collect(),
            coefficients: DMatrix::zeros(self.coefficients.nrows(), self.coefficients.ncols()),
        }
    }

    /// Every parameter block in a fixed order: for each view and layer the
    /// weight then the bias, and finally `C`.
    pub fn blocks(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for layers in &self.views {
            for l in layers {
                out.push(l.weight.as_slice());
                out.push(l.bias.as_slice());
            }
        }
        out.push(self.coefficients.as_slice());
        out
    }

    /// Mutable counterpart of [`NetworkState::blocks`], same order.
    pub fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::new();
        for layers in &mut self.views {
            for l in layers {
                out.push(l.weight.as_mut_slice());
                out.push(l.bias.as_mut_slice());
            }
        }
        out.push(self.coefficients.as_mut_slice());
        out
    }

    /// Names matching [`NetworkState::blocks`], e.g. `view1.layer3.weight`.
    pub fn block_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (k, layers) in self.views.iter().enumerate() {
            for m in 0..layers.len() {
                out.push(format!("view{}.layer{}.weight", k + 1, m + 1));
                out.push(format!("view{}.layer{}.bias", k + 1, m + 1));
            }
        }
        out.push("coefficients".to_string());
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }
}

/// Default width plan for a view of dimension `d`:
/// `[d, h, h, d̂, h, h, d]` with `d̂ = min(d, 32)` and `h = max(d̂, min(d, 128))`.
pub fn default_widths(d: usize) -> Vec<usize> {
    let latent = d.min(32);
    let hidden = latent.max(d.min(128));
    vec![d, hidden, hidden, latent, hidden, hidden, d]
}

/// Mirrors encoder widths into a full plan: `[d, e_1, .., e_h, .., e_1, d]`.
/// The last encoder width is the latent dimension.
pub fn widths_from_encoder(d: usize, encoder: &[usize]) -> Vec<usize> {
    let mut w = vec![d];
    w.extend_from_slice(encoder);
    w.extend(encoder.iter().rev().skip(1));
    w.push(d);
    w
}

pub fn validate_widths(widths: &[usize], view: usize) -> Result<()> {
    let bad = |reason: String| Err(NetworkError::InvalidWidths { view: view + 1, reason });
    if widths.len() < 3 {
        return bad(format!("need at least 2 layers, got {} widths", widths.len()));
    }
    let layers = widths.len() - 1;
    if layers % 2 != 0 {
        return bad(format!("layer count {layers} is odd; the latent layer sits at M/2"));
    }
    if widths.contains(&0) {
        return bad("widths must be positive".into());
    }
    if widths[0] != widths[layers] {
        return bad(format!(
            "decoder output width {} differs from input width {}",
            widths[layers], widths[0]
        ));
    }
    Ok(())
}

/// Glorot-uniform weights, zero biases, and `C` uniform in `[-1e-4, 1e-4]`.
pub fn init_network(widths: &[Vec<usize>], n: usize, seed: u64) -> Result<NetworkState> {
    let depth = widths.first().map_or(0, Vec::len);
    for (k, w) in widths.iter().enumerate() {
        validate_widths(w, k)?;
        if w.len() != depth {
            return Err(NetworkError::InvalidWidths {
                view: k + 1,
                reason: "every view needs the same number of layers".into(),
            });
        }
    }
    if widths.is_empty() {
        return Err(NetworkError::InvalidWidths {
            view: 0,
            reason: "no views".into(),
        });
    }
    let mut rng = seeded_rng(seed);
    let views = widths
        .iter()
        .map(|w| {
            w.windows(2)
                .map(|pair| {
                    let (input, output) = (pair[0], pair[1]);
                    let bound = (6.0 / (input + output) as f64).sqrt();
                    LayerParams {
                        weight: DMatrix::from_fn(output, input, |_, _| {
                            rng.random_range(-bound..=bound)
                        }),
                        bias: DVector::zeros(output),
                    }
                })
                .collect()
        })
        .collect();
    let coefficients = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1e-4..=1e-4));
    Ok(NetworkState {
        views,
        coefficients,
    })
}

/// Pre-activations and activations of one view, layers `1..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewCache {
    pub pre: Vec<DMatrix<f64>>,
    pub act: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    pub views: Vec<ViewCache>,
    latent_layer: usize,
}

impl ForwardCache {
    /// `Z_k`, the activations of layer `M/2`.
    pub fn latent(&self, k: usize) -> &DMatrix<f64> {
        &self.views[k].act[self.latent_layer - 1]
    }

    /// `X̃_k`, the decoder output.
    pub fn reconstruction(&self, k: usize) -> &DMatrix<f64> {
        self.views[k].act.last().expect("network has layers")
    }

    pub fn latent_layer(&self) -> usize {
        self.latent_layer
    }
}

pub(crate) fn check_compatible(state: &NetworkState, data: &MultiViewDataset) -> Result<()> {
    if state.views.len() != data.n_views() {
        return Err(NetworkError::ViewCountMismatch {
            network: state.views.len(),
            data: data.n_views(),
        });
    }
    for (k, (layers, x)) in state.views.iter().zip(data.views()).enumerate() {
        if layers[0].input_dim() != x.nrows() {
            return Err(NetworkError::InputDimMismatch {
                view: k + 1,
                expected: layers[0].input_dim(),
                found: x.nrows(),
            });
        }
    }
    let n = data.n_samples();
    if state.coefficients.nrows() != n || state.coefficients.ncols() != n {
        return Err(NetworkError::SampleCountMismatch {
            expected: n,
            found: state.coefficients.nrows(),
        });
    }
    Ok(())
}

pub fn forward(state: &NetworkState, data: &MultiViewDataset) -> Result<ForwardCache> {
    check_compatible(state, data)?;
    let views = state
        .views
        .iter()
        .zip(data.views())
        .enumerate()
        .map(|(k, (layers, x))| forward_view(layers, x, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ForwardCache {
        views,
        latent_layer: state.latent_layer(),
    })
}

fn forward_view(layers: &[LayerParams], x: &DMatrix<f64>, k: usize) -> Result<ViewCache> {
    let depth = layers.len();
    let mut pre = Vec::with_capacity(depth);
    let mut act: Vec<DMatrix<f64>> = Vec::with_capacity(depth);
    for (m, layer) in layers.iter().enumerate() {
        let input = if m == 0 { x } else { &act[m - 1] };
        let mut y = &layer.weight * input;
        for mut col in y.column_iter_mut() {
            col += &layer.bias;
        }
        let f = if m + 1 == depth {
            y.clone()
        } else {
            y.map(activation)
        };
        if f.iter().any(|v| !v.is_finite()) {
            return Err(NetworkError::NonFinite {
                view: k + 1,
                layer: m + 1,
            });
        }
        pre.push(y);
        act.push(f);
    }
    Ok(ViewCache { pre, act })
}

/// `1/2 ||X_k - X̃_k||_F^2` per view.
pub fn reconstruction_loss(cache: &ForwardCache, data: &MultiViewDataset) -> Vec<f64> {
    data.views()
        .iter()
        .enumerate()
        .map(|(k, x)| 0.5 * (x - cache.reconstruction(k)).norm_squared())
        .collect()
}

/// `1/2 ||Z_k - Z_k C||_F^2` per view.
pub fn self_expression_loss(cache: &ForwardCache, c: &DMatrix<f64>) -> Vec<f64> {
    (0..cache.views.len())
        .map(|k| {
            let z = cache.latent(k);
            0.5 * (z - z * c).norm_squared()
        })
        .collect()
}

/// Unweighted loss terms; `total = reconstruction + α·self_expression + β·graph`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub reconstruction: f64,
    pub self_expression: f64,
    pub graph: f64,
}

pub fn loss_from_cache(
    cache: &ForwardCache,
    state: &NetworkState,
    data: &MultiViewDataset,
    laplacian: &GraphLaplacian,
    alpha: f64,
    beta: f64,
) -> LossBreakdown {
    let reconstruction: f64 = reconstruction_loss(cache, data).iter().sum();
    let self_expression: f64 = self_expression_loss(cache, &state.coefficients).iter().sum();
    let graph = graph_regularizer(&state.coefficients, laplacian);
    LossBreakdown {
        total: reconstruction + alpha * self_expression + beta * graph,
        reconstruction,
        self_expression,
        graph,
    }
}

pub fn total_loss(
    state: &NetworkState,
    data: &MultiViewDataset,
    laplacian: &GraphLaplacian,
    alpha: f64,
    beta: f64,
) -> Result<LossBreakdown> {
    let cache = forward(state, data)?;
    Ok(loss_from_cache(&cache, state, data, laplacian, alpha, beta))
}
