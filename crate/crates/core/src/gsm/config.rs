use serde::{Deserialize, Serialize};

use crate::dist::MixingFamily;
use crate::graph::EdgePriorWeights;
use crate::{Error, Result};

/// Per-margin mixing law and location-scale offsets `μ_i = α_i + β_i d_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginSpec {
    pub mixing: MixingFamily,
    #[serde(default)]
    pub skew_alpha: f64,
    #[serde(default)]
    pub skew_beta: f64,
}

impl MarginSpec {
    pub fn new(mixing: MixingFamily) -> Self {
        MarginSpec {
            mixing,
            skew_alpha: 0.0,
            skew_beta: 0.0,
        }
    }

    pub fn gaussian() -> Self {
        Self::new(MixingFamily::Degenerate)
    }

    #[inline]
    pub fn location(&self, d: f64) -> f64 {
        self.skew_alpha + self.skew_beta * d
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GsmConfig {
    /// HIW degrees of freedom.
    pub b: f64,
    /// HIW scale multiplier: prior scale is `ρI`.
    pub rho: f64,
    pub edge_weights: EdgePriorWeights,
    pub margins: Vec<MarginSpec>,
    /// Initial random-walk step on `log d_i`.
    pub scale_step: f64,
    pub iters: usize,
    pub burnin: usize,
    pub seed: u64,
    /// Graph Metropolis-Hastings steps per sweep.
    pub graph_moves_per_sweep: usize,
    /// Draw `Σ⁻¹` from its conditional posterior after burn-in.
    pub sample_precision: bool,
    /// Sweeps between full recomputations of the cached log marginal.
    pub drift_check_every: usize,
}

impl GsmConfig {
    /// Defaults: `b = 10`, `ρ = 0.5`, edge weight 0.1, one graph move per
    /// variable per sweep.
    pub fn new(margins: Vec<MarginSpec>, iters: usize, burnin: usize, seed: u64) -> Result<Self> {
        let q = margins.len();
        Ok(GsmConfig {
            b: 10.0,
            rho: 0.5,
            edge_weights: EdgePriorWeights::uniform(q, 0.1)?,
            margins,
            scale_step: 0.5,
            iters,
            burnin,
            seed,
            graph_moves_per_sweep: q.max(1),
            sample_precision: true,
            drift_check_every: 1000,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.margins.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidConfig(format!("b must be positive, got {}", self.b)));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidConfig(format!("rho must be positive, got {}", self.rho)));
        }
        if self.iters <= self.burnin {
            return Err(Error::InvalidConfig(format!(
                "iters ({}) must exceed burnin ({})",
                self.iters, self.burnin
            )));
        }
        if !(self.scale_step > 0.0 && self.scale_step.is_finite()) {
            return Err(Error::InvalidConfig("scale_step must be positive".into()));
        }
        if self.edge_weights.num_vertices() != self.margins.len() {
            return Err(Error::InvalidConfig(format!(
                "edge weights cover {} variables, margins {}",
                self.edge_weights.num_vertices(),
                self.margins.len()
            )));
        }
        for m in &self.margins {
            m.mixing.validate()?;
            if !(m.skew_alpha.is_finite() && m.skew_beta.is_finite()) {
                return Err(Error::InvalidConfig("skew offsets must be finite".into()));
            }
        }
        Ok(())
    }
}
