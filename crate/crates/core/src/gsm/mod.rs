//! Continuous model with Gaussian-scale-mixture margins.
//!
//! Column `i` is modelled as `y_i = √d_i z_i + α_i + β_i d_i`, where `z`
//! rows are Gaussian with covariance `Σ ~ HIW_G(b, ρI)` over a decomposable
//! graph `G` and `d_i` follows the margin's mixing law. Graph moves use the
//! collapsed hyper-matrix-t marginal of the transformed data; scales are
//! updated by adaptive random walks on `log d_i`.

mod chain;
mod config;
pub mod tails;
mod transform;

pub use chain::{run_chain, sample_sigma_posterior, GsmDiagnostics, GsmRun, GsmSampler, GsmState};
pub use config::{GsmConfig, MarginSpec};
pub use tails::{recommend_mixing, TailClass, TailReport};
pub use transform::{transform, untransform};
