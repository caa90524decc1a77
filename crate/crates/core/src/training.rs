//! Gradients, a finite-difference oracle, Adam, and the training loop.
//!
//! The backward pass runs the usual reconstruction recursion down every
//! autoencoder. At the latent layer `M/2` it adds `α` times the derivative of
//! `1/2 ||Z (I - C)||_F^2` with respect to `Z`, which is `Z (I - C)(I - C)^T`,
//! gated by the activation slope; below the latent layer both signals share
//! the same recursion. The coefficient gradient is
//! `α Σ_k (Z_k^T Z_k C - Z_k^T Z_k) + β (L^T + L) C`, summed in view order.

use std::ops::{Deref, DerefMut};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetError, MultiViewDataset, NormalizeScheme};
use crate::graph::{graph_regularizer, FusionMode, GraphError, GraphLaplacian, MultiViewGraph};
use crate::network::{
    self, activation_slope, check_compatible, default_widths, forward, init_network,
    loss_from_cache, widths_from_encoder, ForwardCache, LossBreakdown, NetworkError,
    NetworkState,
};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("forward cache does not match the network state or data")]
    CacheMismatch,
    #[error("{stage} diverged at epoch {epoch}: loss is not finite")]
    Diverged { stage: &'static str, epoch: usize },
}

pub type Result<T> = std::result::Result<T, TrainError>;

/// Gradient of the objective with respect to every parameter, stored in the
/// same layout as [`NetworkState`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub NetworkState);

impl Deref for Gradients {
    type Target = NetworkState;

    fn deref(&self) -> &NetworkState {
        &self.0
    }
}

impl DerefMut for Gradients {
    fn deref_mut(&mut self) -> &mut NetworkState {
        &mut self.0
    }
}

impl Gradients {
    pub fn zeros_like(state: &NetworkState) -> Self {
        Self(state.zeros_like())
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().iter().all(|b| b.iter().all(|v| v.is_finite()))
    }
}

fn check_cache(state: &NetworkState, cache: &ForwardCache, n: usize) -> Result<()> {
    let ok = cache.views.len() == state.views.len()
        && cache.latent_layer() == state.latent_layer()
        && state.views.iter().zip(&cache.views).all(|(layers, vc)| {
            vc.act.len() == layers.len()
                && vc.pre.len() == layers.len()
                && layers
                    .iter()
                    .zip(&vc.act)
                    .all(|(l, a)| a.nrows() == l.output_dim() && a.ncols() == n)
        });
    if ok {
        Ok(())
    } else {
        Err(TrainError::CacheMismatch)
    }
}

/// Analytic gradient of `Σ_k (L1_k + α L2_k) + β Tr(C^T L C)`.
pub fn backward(
    state: &NetworkState,
    data: &MultiViewDataset,
    laplacian: &GraphLaplacian,
    alpha: f64,
    beta: f64,
    cache: &ForwardCache,
) -> Result<Gradients> {
    check_compatible(state, data)?;
    check_cache(state, cache, data.n_samples())?;
    if laplacian.n() != data.n_samples() {
        return Err(TrainError::CacheMismatch);
    }
    let mut grads = network_gradients(state, data, alpha, cache);

    let c = &state.coefficients;
    let l = laplacian.matrix();
    let mut gc = (l.transpose() + l) * c * beta;
    for k in 0..cache.views.len() {
        let z = cache.latent(k);
        let residual = z - z * c;
        // α (Z^T Z C - Z^T Z) = -α Z^T (Z - Z C)
        gc -= z.transpose() * residual * alpha;
    }
    grads.coefficients = gc;
    Ok(grads)
}

/// Weight and bias gradients only; the coefficient block is left zero.
fn network_gradients(
    state: &NetworkState,
    data: &MultiViewDataset,
    alpha: f64,
    cache: &ForwardCache,
) -> Gradients {
    let mut grads = Gradients::zeros_like(state);
    let latent = state.latent_layer();
    let c = &state.coefficients;
    let i_minus_c = if alpha != 0.0 {
        Some(DMatrix::identity(c.nrows(), c.ncols()) - c)
    } else {
        None
    };

    for (k, (layers, vc)) in state.views.iter().zip(&cache.views).enumerate() {
        let x = data.view(k);
        let depth = layers.len();
        // Linear output layer: the slope is 1.
        let mut delta = &vc.act[depth - 1] - x;
        for m in (0..depth).rev() {
            if m + 1 == latent {
                if let Some(imc) = &i_minus_c {
                    let z = &vc.act[m];
                    let seed = (z * imc) * imc.transpose();
                    delta += seed.component_mul(&z.map(activation_slope)) * alpha;
                }
            }
            let input = if m == 0 { x } else { &vc.act[m - 1] };
            let g = &mut grads.views[k][m];
            g.weight = &delta * input.transpose();
            g.bias = delta.column_sum();
            if m > 0 {
                delta = (layers[m].weight.transpose() * &delta)
                    .component_mul(&vc.act[m - 1].map(activation_slope));
            }
        }
    }
    grads
}

/// Central differences `(f(θ+h) - f(θ-h)) / 2h` of `f` at `x`.
pub fn central_difference(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], step: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + step;
            let plus = f(&probe);
            probe[i] = x[i] - step;
            let minus = f(&probe);
            probe[i] = x[i];
            (plus - minus) / (2.0 * step)
        })
        .collect()
}

fn flatten(state: &NetworkState) -> Vec<f64> {
    state.blocks().concat()
}

fn unflatten_into(state: &mut NetworkState, flat: &[f64]) {
    let mut offset = 0;
    for block in state.blocks_mut() {
        block.copy_from_slice(&flat[offset..offset + block.len()]);
        offset += block.len();
    }
}

/// Central differences of a sum of terms. Each term is differenced on its own
/// before summing, so large terms that do not depend on a coordinate add no
/// cancellation error to it.
pub fn central_difference_terms(
    mut f: impl FnMut(&[f64]) -> Vec<f64>,
    x: &[f64],
    step: f64,
) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + step;
            let plus = f(&probe);
            probe[i] = x[i] - step;
            let minus = f(&probe);
            probe[i] = x[i];
            let diff: f64 = plus.iter().zip(&minus).map(|(p, m)| p - m).sum();
            diff / (2.0 * step)
        })
        .collect()
}

/// Weighted loss summands: per-view reconstruction, per-view `α`-scaled
/// self-expression, and the `β`-scaled graph term.
fn loss_terms(
    state: &NetworkState,
    data: &MultiViewDataset,
    laplacian: &GraphLaplacian,
    alpha: f64,
    beta: f64,
) -> std::result::Result<Vec<f64>, NetworkError> {
    let cache = forward(state, data)?;
    let mut terms = network::reconstruction_loss(&cache, data);
    terms.extend(
        network::self_expression_loss(&cache, &state.coefficients)
            .into_iter()
            .map(|v| alpha * v),
    );
    terms.push(beta * graph_regularizer(&state.coefficients, laplacian));
    Ok(terms)
}

/// Finite-difference estimate of the full gradient; `O(P)` loss evaluations.
pub fn finite_difference_grad(
    state: &NetworkState,
    data: &MultiViewDataset,
    laplacian: &GraphLaplacian,
    alpha: f64,
    beta: f64,
    step: f64,
) -> Result<Gradients> {
    check_compatible(state, data)?;
    let mut probe = state.clone();
    let mut failure = None;
    let flat = central_difference_terms(
        |theta| {
            unflatten_into(&mut probe, theta);
            match loss_terms(&probe, data, laplacian, alpha, beta) {
                Ok(terms) => terms,
                Err(e) => {
                    failure.get_or_insert(e);
                    vec![f64::NAN]
                }
            }
        },
        &flatten(state),
        step,
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    let mut grads = Gradients::zeros_like(state);
    unflatten_into(&mut grads, &flat);
    Ok(grads)
}

/// Worst disagreement between two gradients within one parameter block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDiscrepancy {
    pub name: String,
    /// Max `|a - b| / max(|a|, |b|)` over entries with `max(|a|, |b|) >= floor`.
    pub max_relative: f64,
    /// Max `|a - b|` over entries below `floor`.
    pub max_absolute: f64,
    pub entries: usize,
}

impl BlockDiscrepancy {
    pub fn passes(&self, rel_tol: f64, floor: f64) -> bool {
        self.max_relative <= rel_tol && self.max_absolute <= floor
    }
}

/// Compares gradients block by block. Entries whose magnitude is below
/// `floor` are compared absolutely.
pub fn compare_gradients(analytic: &Gradients, numeric: &Gradients, floor: f64) -> Vec<BlockDiscrepancy> {
    analytic
        .block_names()
        .into_iter()
        .zip(analytic.blocks().into_iter().zip(numeric.blocks()))
        .map(|(name, (a, b))| {
            let mut max_relative: f64 = 0.0;
            let mut max_absolute: f64 = 0.0;
            for (&x, &y) in a.iter().zip(b) {
                let diff = (x - y).abs();
                let scale = x.abs().max(y.abs());
                if scale >= floor {
                    max_relative = max_relative.max(diff / scale);
                } else {
                    max_absolute = max_absolute.max(diff);
                }
                if diff.is_nan() {
                    max_relative = f64::INFINITY;
                }
            }
            BlockDiscrepancy {
                name,
                max_relative,
                max_absolute,
                entries: a.len(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment accumulators mirroring the parameter layout.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    first: Gradients,
    second: Gradients,
    step: u64,
}

impl AdamState {
    pub fn new(params: &NetworkState) -> Self {
        Self {
            first: Gradients::zeros_like(params),
            second: Gradients::zeros_like(params),
            step: 0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected Adam update of every parameter, `C` included.
pub fn adam_step(params: &mut NetworkState, grads: &Gradients, adam: &mut AdamState, cfg: &AdamConfig) {
    adam.step += 1;
    let t = adam.step as i32;
    let correct1 = 1.0 - cfg.beta1.powi(t);
    let correct2 = 1.0 - cfg.beta2.powi(t);
    let blocks = params
        .blocks_mut()
        .into_iter()
        .zip(grads.blocks())
        .zip(adam.first.blocks_mut().into_iter().zip(adam.second.blocks_mut()));
    for ((p, g), (m, v)) in blocks {
        for i in 0..p.len() {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            let m_hat = m[i] / correct1;
            let v_hat = v[i] / correct2;
            p[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
}

/// Reconstruction-only Adam training of the autoencoders; `C` is frozen.
/// Returns the state and the reconstruction loss before every update.
pub fn pretrain(
    state: NetworkState,
    data: &MultiViewDataset,
    epochs: usize,
    cfg: &AdamConfig,
) -> Result<(NetworkState, Vec<f64>)> {
    check_compatible(&state, data)?;
    let mut state = state;
    let mut adam = AdamState::new(&state);
    let mut history = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let cache = forward(&state, data).map_err(|e| diverged_or(e, "pretraining", epoch))?;
        let loss: f64 = network::reconstruction_loss(&cache, data).iter().sum();
        if !loss.is_finite() {
            return Err(TrainError::Diverged {
                stage: "pretraining",
                epoch,
            });
        }
        history.push(loss);
        let grads = network_gradients(&state, data, 0.0, &cache);
        adam_step(&mut state, &grads, &mut adam, cfg);
    }
    Ok((state, history))
}

fn diverged_or(e: NetworkError, stage: &'static str, epoch: usize) -> TrainError {
    match e {
        NetworkError::NonFinite { .. } => TrainError::Diverged { stage, epoch },
        other => other.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Neighbours for both first- and second-order graphs.
    pub k: usize,
    pub fusion: FusionMode,
    pub adam: AdamConfig,
    pub pretrain_epochs: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Encoder widths after the input, shared by all views; the last entry is
    /// the latent width and the decoder mirrors them. `None` selects
    /// [`default_widths`] per view.
    pub layers: Option<Vec<usize>>,
    pub normalize: NormalizeScheme,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            beta: 100.0,
            k: 20,
            fusion: FusionMode::Both,
            adam: AdamConfig::default(),
            pretrain_epochs: 500,
            epochs: 5000,
            seed: 0,
            layers: None,
            normalize: NormalizeScheme::MinMax,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TrainError::InvalidConfig(m));
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        let a = &self.adam;
        for (name, v) in [
            ("learning rate", a.learning_rate),
            ("beta1", a.beta1),
            ("beta2", a.beta2),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        if !(a.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", a.epsilon));
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if let Some(layers) = &self.layers {
            if layers.is_empty() || layers.contains(&0) {
                return bad(format!("layer widths must be nonempty and positive, got {layers:?}"));
            }
        }
        Ok(())
    }

    pub fn widths_for(&self, view_dims: &[usize]) -> Vec<Vec<usize>> {
        view_dims
            .iter()
            .map(|&d| match &self.layers {
                Some(enc) => widths_from_encoder(d, enc),
                None => default_widths(d),
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub state: NetworkState,
    pub graph: MultiViewGraph,
    /// Reconstruction loss before each pretraining update.
    pub pretrain_history: Vec<f64>,
    /// Loss terms before each joint update.
    pub history: Vec<LossBreakdown>,
}

/// Normalizes the views, builds and fuses the graphs once, optionally
/// pretrains, then runs full-batch Adam on all weights and `C`.
pub fn train(config: &TrainConfig, data: &MultiViewDataset) -> Result<TrainOutcome> {
    config.validate()?;
    let data = data.normalized(config.normalize)?;
    let graph = MultiViewGraph::build(data.views(), config.k, config.fusion)?;
    let widths = config.widths_for(&data.view_dims());
    let state = init_network(&widths, data.n_samples(), config.seed)?;
    let (mut state, pretrain_history) = pretrain(state, &data, config.pretrain_epochs, &config.adam)?;

    let mut adam = AdamState::new(&state);
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let cache = forward(&state, &data).map_err(|e| diverged_or(e, "training", epoch))?;
        let loss = loss_from_cache(&cache, &state, &data, &graph.laplacian, config.alpha, config.beta);
        if !loss.total.is_finite() {
            return Err(TrainError::Diverged {
                stage: "training",
                epoch,
            });
        }
        history.push(loss);
        let grads = backward(&state, &data, &graph.laplacian, config.alpha, config.beta, &cache)?;
        adam_step(&mut state, &grads, &mut adam, &config.adam);
    }
    Ok(TrainOutcome {
        state,
        graph,
        pretrain_history,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, SyntheticSpec};
    use crate::network::{init_network, LayerParams};

    fn tiny_data() -> MultiViewDataset {
        generate_synthetic(&SyntheticSpec {
            clusters: 2,
            per_cluster: 4,
            subspace_dim: 1,
            latent_dim: 3,
            view_dims: vec![4, 3],
            noise: 0.05,
            seed: 11,
        })
        .unwrap()
    }

    fn random_laplacian(n: usize) -> GraphLaplacian {
        let mut rng = crate::seeded_rng(99);
        use rand::Rng;
        let mut w = DMatrix::from_fn(n, n, |_, _| rng.random_range(0.0..1.0));
        w = (&w + w.transpose()) * 0.5;
        w.fill_diagonal(0.0);
        GraphLaplacian::from_weights(&w)
    }

    #[test]
    fn coefficient_gradient_closed_forms() {
        let data = tiny_data();
        let mut state = init_network(&[vec![4, 3, 2, 3, 4], vec![3, 3, 2, 3, 3]], 8, 3).unwrap();
        state.coefficients = DMatrix::from_fn(8, 8, |i, j| ((i * 8 + j) as f64).sin() * 0.1);
        let l = random_laplacian(8);
        let cache = forward(&state, &data).unwrap();

        let g = backward(&state, &data, &l, 0.0, 100.0, &cache).unwrap();
        let expected = (l.matrix().transpose() + l.matrix()) * &state.coefficients * 100.0;
        assert_eq!(g.coefficients, expected);

        state.coefficients.fill(0.0);
        let cache = forward(&state, &data).unwrap();
        let g = backward(&state, &data, &l, 0.1, 0.0, &cache).unwrap();
        let mut expected = DMatrix::zeros(8, 8);
        for k in 0..2 {
            let z = cache.latent(k);
            expected -= z.transpose() * z * 0.1;
        }
        assert!((&g.coefficients - expected).amax() < 1e-15);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let data = tiny_data();
        let mut state = init_network(&[vec![4, 3, 2, 3, 4], vec![3, 2, 2, 2, 3]], 8, 5).unwrap();
        state.coefficients = DMatrix::from_fn(8, 8, |i, j| ((3 * i + j) as f64).cos() * 0.05);
        for layers in &mut state.views {
            for l in layers.iter_mut() {
                l.bias = l.bias.map(|_| 0.01);
            }
        }
        let l = random_laplacian(8);
        let cache = forward(&state, &data).unwrap();
        let analytic = backward(&state, &data, &l, 0.1, 100.0, &cache).unwrap();
        let numeric = finite_difference_grad(&state, &data, &l, 0.1, 100.0, 1e-6).unwrap();
        for block in compare_gradients(&analytic, &numeric, 1e-8) {
            assert!(block.passes(1e-5, 1e-8), "{block:?}");
        }
    }

    #[test]
    fn central_difference_exact_on_quadratics() {
        // f(x) = x^T A x / 2 + b^T x with symmetric A, so grad = A x + b.
        let a = [[2.0, 0.5, -1.0], [0.5, 3.0, 0.25], [-1.0, 0.25, 1.5]];
        let b = [1.0, -2.0, 0.5];
        let f = |x: &[f64]| {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += 0.5 * x[i] * a[i][j] * x[j];
                }
                s += b[i] * x[i];
            }
            s
        };
        let x = [0.3, -0.7, 1.1];
        let g = central_difference(f, &x, 1e-3);
        for i in 0..3 {
            let exact: f64 = (0..3).map(|j| a[i][j] * x[j]).sum::<f64>() + b[i];
            assert!((g[i] - exact).abs() < 1e-9, "{} vs {}", g[i], exact);
        }
    }

    #[test]
    fn zero_network_output_bias_gradient() {
        // With every weight zero the output is the final bias, so
        // dL/db_M = -Σ_i (x_i - b_M) row-wise.
        let data = tiny_data();
        let state = init_network(&[vec![4, 3, 2, 3, 4], vec![3, 2, 2, 2, 3]], 8, 1)
            .unwrap()
            .zeros_like();
        let l = GraphLaplacian::from_matrix(DMatrix::zeros(8, 8));
        let numeric = finite_difference_grad(&state, &data, &l, 0.1, 0.0, 1e-5).unwrap();
        for k in 0..2 {
            let x = data.view(k);
            let expected = -x.column_sum();
            let got = &numeric.views[k][3].bias;
            assert!((got - &expected).amax() < 1e-8, "{got} vs {expected}");
        }
    }

    #[test]
    fn adam_examples() {
        let mut params = NetworkState {
            views: vec![vec![LayerParams::zeros(1, 1)]],
            coefficients: DMatrix::zeros(1, 1),
        };
        let cfg = AdamConfig::default();
        let mut adam = AdamState::new(&params);
        let zero = Gradients::zeros_like(&params);
        adam_step(&mut params, &zero, &mut adam, &cfg);
        assert_eq!(params.views[0][0].weight[(0, 0)], 0.0);
        assert_eq!(adam.step(), 1);

        let mut params = params.zeros_like();
        let mut adam = AdamState::new(&params);
        let mut g = Gradients::zeros_like(&params);
        g.views[0][0].weight[(0, 0)] = 1.0;
        let (mut p2, mut a2) = (params.clone(), adam.clone());
        adam_step(&mut params, &g, &mut adam, &cfg);
        // m̂ = 1, v̂ = 1, step = lr / (1 + eps)
        let w = params.views[0][0].weight[(0, 0)];
        assert_eq!(w, -1e-3 / (1.0 + 1e-8));
        adam_step(&mut p2, &g, &mut a2, &cfg);
        assert_eq!(params, p2);
        assert_eq!(adam, a2);
    }

    #[test]
    fn pretrain_identity_and_progress() {
        let data = tiny_data();
        let state = init_network(&[vec![4, 3, 2, 3, 4], vec![3, 2, 2, 2, 3]], 8, 2).unwrap();
        let cfg = AdamConfig::default();
        let (same, hist) = pretrain(state.clone(), &data, 0, &cfg).unwrap();
        assert_eq!(same, state);
        assert!(hist.is_empty());

        let (trained, hist) = pretrain(state.clone(), &data, 200, &cfg).unwrap();
        assert_eq!(hist.len(), 200);
        assert!(hist[199] < hist[0]);
        assert_eq!(trained.coefficients, state.coefficients);
        let (again, _) = pretrain(state, &data, 200, &cfg).unwrap();
        assert_eq!(trained, again);
    }

    #[test]
    fn train_zero_epochs_returns_initial_state() {
        let data = tiny_data();
        let config = TrainConfig {
            k: 3,
            epochs: 0,
            pretrain_epochs: 0,
            ..TrainConfig::default()
        };
        let out = train(&config, &data).unwrap();
        assert!(out.history.is_empty());
        assert!(out.pretrain_history.is_empty());
        let widths = config.widths_for(&data.view_dims());
        assert_eq!(out.state, init_network(&widths, 8, 0).unwrap());
    }

    #[test]
    fn config_validation() {
        let bad = TrainConfig {
            alpha: -1.0,
            ..TrainConfig::default()
        };
        assert!(matches!(bad.validate(), Err(TrainError::InvalidConfig(_))));
        let bad = TrainConfig {
            adam: AdamConfig {
                learning_rate: 1.5,
                ..AdamConfig::default()
            },
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(TrainConfig::default().validate().is_ok());
    }

    #[test]
    fn cache_mismatch_is_rejected() {
        let data = tiny_data();
        let a = init_network(&[vec![4, 3, 2, 3, 4], vec![3, 2, 2, 2, 3]], 8, 2).unwrap();
        let b = init_network(&[vec![4, 2, 4], vec![3, 2, 3]], 8, 2).unwrap();
        let cache = forward(&b, &data).unwrap();
        let l = GraphLaplacian::from_matrix(DMatrix::zeros(8, 8));
        assert!(matches!(
            backward(&a, &data, &l, 0.1, 1.0, &cache),
            Err(TrainError::CacheMismatch)
        ));
    }
}
