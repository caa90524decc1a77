//! Multi-view subspace clustering with a shared self-expressive coefficient
//! matrix regularized by a fused local/global graph Laplacian (MSCNLG).
//!
//! The pipeline is split into the following modules:
//!
//! - [`dataset`]: multi-view data loading, normalization, and synthesis.
//! - [`graph`]: mutual-kNN first/second-order proximity graphs, Hadamard
//!   fusion across views, and the Laplacian smoothness regularizer.
//! - [`network`]: per-view autoencoders with a shared coefficient matrix.
//! - [`training`]: backpropagation, a finite-difference oracle, Adam, and the
//!   training loop.
//! - [`spectral`]: spectral clustering of the learned coefficient matrix.
//! - [`metrics`]: NMI, ACC, pairwise F-measure, Rand index, average rank.
//! - [`experiment`]: end-to-end runs, parameter sweeps, gradient checks and
//!   reports.
//!
//! Samples are stored as matrix columns throughout: a view with `d` features
//! over `n` samples is a `d x n` matrix.

pub mod dataset;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod network;
pub mod spectral;
pub mod training;

pub use nalgebra::{DMatrix, DVector};

pub(crate) fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
