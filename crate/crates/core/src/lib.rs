//! Bayesian structure learning for sparse conditional (sign-)independence
//! graphs.
//!
//! Two model families are provided:
//!
//! * [`gsm`]: continuous data whose margins are Gaussian scale mixtures. Each
//!   column carries a random variance `d_i`; the rescaled data follow a
//!   matrix-normal law whose covariance is hyper-inverse-Wishart over a
//!   decomposable graph. Graph moves use the collapsed hyper-matrix-t marginal.
//! * [`mixed`]: binary (or small-integer) and continuous columns modelled
//!   jointly through Pólya-Gamma scales, with the precision decomposed as
//!   `Ω = Θ Γ Θ` and a spike-and-slab prior on the off-diagonal of `Γ`.
//!
//! Supporting modules: [`graph`] (decomposable graphs and junction-tree
//! bookkeeping), [`dist`] (samplers and densities), and [`sim`] (ground-truth
//! generators and sign-detection tables).

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bitset;
pub mod dist;
mod error;
pub mod graph;
pub mod gsm;
pub mod linalg;
pub mod mcmc;
pub mod mixed;
pub mod sim;
pub mod summary;

pub use error::{Error, Result};
pub use graph::{DecomposableGraph, EdgePriorWeights};
pub use summary::{PosteriorSample, PosteriorSummary, SummaryAccumulator};

/// RNG used for every chain and generator. Seeded runs are bitwise reproducible.
pub type ChainRng = rand_chacha::ChaCha8Rng;

/// Builds the crate's RNG from a `u64` seed.
pub fn rng_from_seed(seed: u64) -> ChainRng {
    use rand::SeedableRng;
    ChainRng::seed_from_u64(seed)
}
