//! Metropolis-Hastings helpers shared by the samplers.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Accepts with probability `min(1, exp(log_ratio))`; NaN is rejected.
pub fn mh_accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    if log_ratio >= 0.0 {
        return true;
    }
    if log_ratio.is_nan() {
        return false;
    }
    (1.0 - rng.random::<f64>()).ln() < log_ratio
}

/// Random-walk step size tuned by Robbins-Monro on its logarithm while
/// adapting, then frozen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveStep {
    log_step: f64,
    target: f64,
    adapting: bool,
    updates: u64,
    proposed: u64,
    accepted: u64,
}

impl AdaptiveStep {
    pub const DEFAULT_TARGET: f64 = 0.4;

    pub fn new(step: f64, target: f64) -> Self {
        AdaptiveStep {
            log_step: step.ln(),
            target,
            adapting: true,
            updates: 0,
            proposed: 0,
            accepted: 0,
        }
    }

    #[inline]
    pub fn step(&self) -> f64 {
        self.log_step.exp()
    }

    pub fn is_adapting(&self) -> bool {
        self.adapting
    }

    pub fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += accepted as u64;
        if self.adapting {
            self.updates += 1;
            let gain = (self.updates as f64 + 10.0).powf(-0.6) * 4.0;
            let a = if accepted { 1.0 } else { 0.0 };
            self.log_step = (self.log_step + gain.min(1.0) * (a - self.target)).clamp(-12.0, 5.0);
        }
    }

    /// Stops adaptation and resets the acceptance counters.
    pub fn freeze(&mut self) {
        self.adapting = false;
        self.proposed = 0;
        self.accepted = 0;
    }

    pub fn proposed(&self) -> u64 {
        self.proposed
    }

    /// Acceptance rate since construction or the last [`freeze`](Self::freeze).
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            f64::NAN
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

/// Acceptance counter for moves without a tunable step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceCounter {
    pub proposed: u64,
    pub accepted: u64,
}

impl AcceptanceCounter {
    pub fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += accepted as u64;
    }

    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            f64::NAN
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}
