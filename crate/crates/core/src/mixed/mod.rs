//! Joint model for discrete (binary or small-integer) and continuous columns.
//!
//! Rows of the centred data are Gaussian with precision `Ω = Θ Γ Θ`, where
//! `Θ` is diagonal and `Γ` has unit diagonal. Off-diagonal entries of `Γ` are
//! the negatives of the partial correlations and carry a spike-and-slab
//! prior, so exact zeros in `Γ` are exact zeros in `Ω`. Discrete coordinates
//! have `Θ_j² = 1/ω_j` with Pólya-Gamma `ω_j`; continuous diagonals
//! `Θ_γ²` are Gamma distributed.

mod chain;

pub use chain::{run_mixed_chain, MixedDiagnostics, MixedRun, MixedSampler};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::is_positive_definite;
use crate::{Error, Result};

/// Raw mixed data: the first `num_discrete` columns are integer valued and
/// are shifted by `centering` before modelling.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedData {
    values: DMatrix<f64>,
    num_discrete: usize,
    centering: f64,
}

impl MixedData {
    pub fn new(values: DMatrix<f64>, num_discrete: usize, centering: f64) -> Result<Self> {
        if num_discrete > values.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{num_discrete} discrete columns for {} columns",
                values.ncols()
            )));
        }
        if !centering.is_finite() {
            return Err(Error::InvalidParams("centering must be finite".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("data contain non-finite values".into()));
        }
        for j in 0..num_discrete {
            if let Some(i) = values.column(j).iter().position(|v| v.fract() != 0.0) {
                return Err(Error::InvalidParams(format!(
                    "discrete column {j} has non-integer value {} at row {i}",
                    values[(i, j)]
                )));
            }
        }
        Ok(MixedData {
            values,
            num_discrete,
            centering,
        })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn num_discrete(&self) -> usize {
        self.num_discrete
    }

    pub fn num_continuous(&self) -> usize {
        self.values.ncols() - self.num_discrete
    }

    pub fn num_vars(&self) -> usize {
        self.values.ncols()
    }

    pub fn centering(&self) -> f64 {
        self.centering
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Data with the discrete columns centred.
    pub fn transformed(&self) -> DMatrix<f64> {
        center_discrete(&self.values, self.num_discrete, self.centering)
    }
}

/// Subtracts `c` from the first `num_discrete` columns.
pub fn center_discrete(values: &DMatrix<f64>, num_discrete: usize, c: f64) -> DMatrix<f64> {
    let mut out = values.clone();
    for j in 0..num_discrete.min(values.ncols()) {
        out.column_mut(j).add_scalar_mut(-c);
    }
    out
}

/// `Ω = Θ Γ Θ` with inclusion indicators for the off-diagonal of `Γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionDecomp {
    pub theta: DVector<f64>,
    pub gamma: DMatrix<f64>,
    pub inclusion: DMatrix<bool>,
}

impl PrecisionDecomp {
    /// `Γ = I` with no pair included.
    pub fn diagonal(theta: DVector<f64>) -> Self {
        let p = theta.len();
        PrecisionDecomp {
            theta,
            gamma: DMatrix::identity(p, p),
            inclusion: DMatrix::from_element(p, p, false),
        }
    }

    /// Splits an SPD precision; every non-zero off-diagonal entry is marked
    /// as included.
    pub fn from_precision(omega: &DMatrix<f64>) -> Result<Self> {
        if !omega.is_square() {
            return Err(Error::DimensionMismatch("precision must be square".into()));
        }
        if !is_positive_definite(omega) {
            return Err(Error::NotPositiveDefinite);
        }
        let p = omega.nrows();
        let theta = DVector::from_fn(p, |i, _| omega[(i, i)].sqrt());
        let gamma = DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                1.0
            } else {
                omega[(i, j)] / (theta[i] * theta[j])
            }
        });
        let inclusion = DMatrix::from_fn(p, p, |i, j| i != j && gamma[(i, j)] != 0.0);
        Ok(PrecisionDecomp {
            theta,
            gamma,
            inclusion,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.theta.len()
    }

    pub fn precision(&self) -> DMatrix<f64> {
        let t = &self.theta;
        DMatrix::from_fn(t.len(), t.len(), |i, j| t[i] * self.gamma[(i, j)] * t[j])
    }

    /// Checks the unit diagonal, symmetry, spike zeros and positive
    /// definiteness.
    pub fn validate(&self) -> Result<()> {
        let p = self.num_vars();
        if self.gamma.shape() != (p, p) || self.inclusion.shape() != (p, p) {
            return Err(Error::DimensionMismatch("decomposition blocks disagree".into()));
        }
        if self.theta.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParams("theta must be positive".into()));
        }
        for i in 0..p {
            if self.gamma[(i, i)] != 1.0 {
                return Err(Error::InvalidParams(format!("gamma[{i},{i}] is not 1")));
            }
            for j in 0..i {
                let g = self.gamma[(i, j)];
                if g != self.gamma[(j, i)] || self.inclusion[(i, j)] != self.inclusion[(j, i)] {
                    return Err(Error::InvalidParams("gamma is not symmetric".into()));
                }
                if !self.inclusion[(i, j)] && g != 0.0 {
                    return Err(Error::InvalidParams(format!(
                        "excluded pair ({j}, {i}) has gamma {g}"
                    )));
                }
            }
        }
        if !is_positive_definite(&self.gamma) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }
}

/// Current point of the mixed-model chain.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    /// Pólya-Gamma scales of the discrete coordinates; `Θ_j² = 1/ω_j`.
    pub omega: Vec<f64>,
    pub decomp: PrecisionDecomp,
    /// Gaussian log-likelihood of the centred data at this state.
    pub loglik: f64,
}

/// `Ω = Θ Γ Θ` for a state.
pub fn precision_from_state(state: &MixedState) -> DMatrix<f64> {
    state.decomp.precision()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedConfig {
    /// Gamma shape of the continuous precision diagonals.
    pub alpha: f64,
    /// Gamma rate of the continuous precision diagonals.
    pub beta: f64,
    /// Prior inclusion weight of each off-diagonal `Γ` entry.
    pub slab_prob: f64,
    /// Shape of the PG(b, 0) prior on each `ω_j`.
    pub pg_shape: u32,
    pub iters: usize,
    pub burnin: usize,
    pub seed: u64,
    /// Initial random-walk steps on `log ω`, `log Θ²` and slab values.
    pub omega_step: f64,
    pub theta_step: f64,
    pub slab_step: f64,
    /// Sweeps between full recomputations of the cached log-likelihood.
    pub drift_check_every: usize,
}

impl MixedConfig {
    /// Defaults: `α = β = 1/2`, slab weight 1/2, PG(1, 0) scales.
    pub fn new(iters: usize, burnin: usize, seed: u64) -> Self {
        MixedConfig {
            alpha: 0.5,
            beta: 0.5,
            slab_prob: 0.5,
            pg_shape: 1,
            iters,
            burnin,
            seed,
            omega_step: 0.5,
            theta_step: 0.5,
            slab_step: 0.1,
            drift_check_every: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !(positive(self.alpha) && positive(self.beta)) {
            return Err(Error::InvalidConfig(format!(
                "alpha and beta must be positive (alpha = {}, beta = {})",
                self.alpha, self.beta
            )));
        }
        if !(self.slab_prob > 0.0 && self.slab_prob < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "slab_prob must lie in (0, 1), got {}",
                self.slab_prob
            )));
        }
        if self.pg_shape == 0 {
            return Err(Error::InvalidConfig("pg_shape must be >= 1".into()));
        }
        if self.iters <= self.burnin {
            return Err(Error::InvalidConfig(format!(
                "iters ({}) must exceed burnin ({})",
                self.iters, self.burnin
            )));
        }
        if !(positive(self.omega_step) && positive(self.theta_step) && positive(self.slab_step)) {
            return Err(Error::InvalidConfig("step sizes must be positive".into()));
        }
        Ok(())
    }
}
