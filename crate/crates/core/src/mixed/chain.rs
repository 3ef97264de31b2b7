use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{MixedConfig, MixedData, MixedState, PrecisionDecomp};
use crate::dist::pg_log_density;
use crate::linalg::{spd_inverse, spd_log_det};
use crate::mcmc::{mh_accept, AcceptanceCounter, AdaptiveStep};
use crate::summary::SummaryAccumulator;
use crate::{ChainRng, Error, Result};

/// Determinant ratios below this are treated as leaving the PD cone.
const MIN_DET_RATIO: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedDiagnostics {
    /// Post-burn-in acceptance of the `log ω_j` steps (discrete coordinates).
    pub omega_acceptance: Vec<f64>,
    /// Post-burn-in acceptance of the `log Θ²` steps (continuous coordinates).
    pub theta_acceptance: Vec<f64>,
    pub diagonal_steps: Vec<f64>,
    pub toggle_acceptance: f64,
    pub slab_acceptance: f64,
    pub slab_step: f64,
}

#[derive(Clone, Debug)]
pub struct MixedRun {
    pub accumulator: SummaryAccumulator,
    pub diagnostics: MixedDiagnostics,
    pub final_state: MixedState,
}

/// One chain of the mixed model. Keeps `H = Γ⁻¹` and `log det Γ` so that a
/// change of a single symmetric pair costs `O(1)` to score and `O(p²)` to
/// commit.
pub struct MixedSampler<'a> {
    config: &'a MixedConfig,
    n: usize,
    num_discrete: usize,
    gram: DMatrix<f64>,
    state: MixedState,
    h: DMatrix<f64>,
    log_det_gamma: f64,
    diag_steps: Vec<AdaptiveStep>,
    slab_step: AdaptiveStep,
    toggle_acc: AcceptanceCounter,
    sweep: usize,
    rng: ChainRng,
}

impl<'a> MixedSampler<'a> {
    /// Starts from `Γ = I` with `Θ_j² = n / (XᵀX)_jj`.
    pub fn new(data: &MixedData, config: &'a MixedConfig) -> Result<Self> {
        config.validate()?;
        let x = data.transformed();
        let n = data.n();
        let p = data.num_vars();
        let d = data.num_discrete();
        let gram = x.transpose() * &x;
        let pg_mean = config.pg_shape as f64 / 4.0;
        let omega: Vec<f64> = (0..d)
            .map(|j| {
                let v = gram[(j, j)] / n.max(1) as f64;
                if v > 0.0 {
                    v
                } else {
                    pg_mean
                }
            })
            .collect();
        let theta = DVector::from_fn(p, |j, _| {
            if j < d {
                omega[j].recip().sqrt()
            } else if gram[(j, j)] > 0.0 {
                (n as f64 / gram[(j, j)]).sqrt()
            } else {
                (config.alpha / config.beta).sqrt()
            }
        });
        let decomp = PrecisionDecomp::diagonal(theta);
        let steps = (0..p)
            .map(|j| {
                let s = if j < d { config.omega_step } else { config.theta_step };
                AdaptiveStep::new(s, AdaptiveStep::DEFAULT_TARGET)
            })
            .collect();
        let mut sampler = MixedSampler {
            config,
            n,
            num_discrete: d,
            gram,
            state: MixedState {
                omega,
                decomp,
                loglik: 0.0,
            },
            h: DMatrix::identity(p, p),
            log_det_gamma: 0.0,
            diag_steps: steps,
            slab_step: AdaptiveStep::new(config.slab_step, AdaptiveStep::DEFAULT_TARGET),
            toggle_acc: AcceptanceCounter::default(),
            sweep: 0,
            rng: crate::rng_from_seed(config.seed),
        };
        sampler.state.loglik = sampler.full_loglik()?;
        Ok(sampler)
    }

    pub fn state(&self) -> &MixedState {
        &self.state
    }

    pub fn sweeps_done(&self) -> usize {
        self.sweep
    }

    fn num_vars(&self) -> usize {
        self.state.decomp.num_vars()
    }

    /// `(n/2) log det Ω − tr(Ω XᵀX)/2 − (np/2) log 2π`, from scratch.
    fn full_loglik(&self) -> Result<f64> {
        let dec = &self.state.decomp;
        let p = self.num_vars();
        let log_det = 2.0 * dec.theta.iter().map(|t| t.ln()).sum::<f64>() + spd_log_det(&dec.gamma)?;
        let mut quad = 0.0;
        for i in 0..p {
            for j in 0..p {
                quad += dec.theta[i] * dec.theta[j] * dec.gamma[(i, j)] * self.gram[(i, j)];
            }
        }
        let (n, pf) = (self.n as f64, p as f64);
        Ok(0.5 * n * log_det - 0.5 * quad - 0.5 * n * pf * (2.0 * PI).ln())
    }

    /// Log-likelihood change from moving `Θ_i` to `t_new`.
    fn theta_delta(&self, i: usize, t_new: f64) -> f64 {
        let dec = &self.state.decomp;
        let t = dec.theta[i];
        let cross: f64 = (0..self.num_vars())
            .filter(|&k| k != i)
            .map(|k| dec.theta[k] * dec.gamma[(i, k)] * self.gram[(i, k)])
            .sum();
        self.n as f64 * (t_new / t).ln()
            - 0.5 * ((t_new * t_new - t * t) * self.gram[(i, i)] + 2.0 * (t_new - t) * cross)
    }

    /// One random-walk step on `log ω_j` for each discrete coordinate.
    pub fn update_omega(&mut self) -> Result<()> {
        for j in 0..self.num_discrete {
            let w = self.state.omega[j];
            let z: f64 = StandardNormal.sample(&mut self.rng);
            let jump = self.diag_steps[j].step() * z;
            let w_new = w * jump.exp();
            if !(w_new > 0.0 && w_new.is_finite()) {
                self.diag_steps[j].record(false);
                continue;
            }
            let t_new = w_new.recip().sqrt();
            let delta = self.theta_delta(j, t_new);
            let b = self.config.pg_shape;
            let log_ratio =
                delta + pg_log_density(b, w_new)? - pg_log_density(b, w)? + jump;
            let accepted = mh_accept(log_ratio, &mut self.rng);
            self.diag_steps[j].record(accepted);
            if accepted {
                self.state.omega[j] = w_new;
                self.state.decomp.theta[j] = t_new;
                self.state.loglik += delta;
            }
        }
        Ok(())
    }

    /// One random-walk step on `log Θ_γ²` for each continuous coordinate,
    /// under a Gamma(α, rate β) prior on `Θ_γ²`.
    pub fn update_theta(&mut self) -> Result<()> {
        let (alpha, beta) = (self.config.alpha, self.config.beta);
        for i in self.num_discrete..self.num_vars() {
            let t = self.state.decomp.theta[i];
            let z: f64 = StandardNormal.sample(&mut self.rng);
            let jump = self.diag_steps[i].step() * z;
            let k_new = t * t * jump.exp();
            if !(k_new > 0.0 && k_new.is_finite()) {
                self.diag_steps[i].record(false);
                continue;
            }
            let t_new = k_new.sqrt();
            let delta = self.theta_delta(i, t_new);
            let log_ratio = delta + alpha * jump - beta * (k_new - t * t);
            let accepted = mh_accept(log_ratio, &mut self.rng);
            self.diag_steps[i].record(accepted);
            if accepted {
                self.state.decomp.theta[i] = t_new;
                self.state.loglik += delta;
            }
        }
        Ok(())
    }

    /// Open interval of values of `Γ_uv` keeping `Γ` positive definite with
    /// every other entry fixed.
    fn feasible_interval(&self, u: usize, v: usize) -> (f64, f64) {
        let (a, huu, hvv) = (self.h[(u, v)], self.h[(u, u)], self.h[(v, v)]);
        let root = (huu * hvv).sqrt();
        let den = a * a - huu * hvv;
        let x = self.state.decomp.gamma[(u, v)];
        (x + (root - a) / den, x - (root + a) / den)
    }

    /// `det(Γ + δ(e_u e_vᵀ + e_v e_uᵀ)) / det Γ`.
    fn det_ratio(&self, u: usize, v: usize, delta: f64) -> f64 {
        let (a, huu, hvv) = (self.h[(u, v)], self.h[(u, u)], self.h[(v, v)]);
        (1.0 + delta * a).powi(2) - delta * delta * huu * hvv
    }

    /// Log-likelihood change of `Γ_uv += δ`, `None` outside the PD cone.
    fn pair_delta(&self, u: usize, v: usize, delta: f64) -> Option<(f64, f64)> {
        let r = self.det_ratio(u, v, delta);
        if !(r > MIN_DET_RATIO) {
            return None;
        }
        let t = &self.state.decomp.theta;
        let m = t[u] * t[v] * self.gram[(u, v)];
        Some((0.5 * self.n as f64 * r.ln() - delta * m, r.ln()))
    }

    fn commit_pair(&mut self, u: usize, v: usize, delta: f64, dll: f64, dlogdet: f64, include: bool) {
        // Woodbury update of H for the symmetric rank-2 change.
        let (a, huu, hvv) = (self.h[(u, v)], self.h[(u, u)], self.h[(v, v)]);
        let c = a + delta.recip();
        let det = huu * hvv - c * c;
        let (m00, m01, m11) = (hvv / det, -c / det, huu / det);
        let hu = self.h.column(u).clone_owned();
        let hv = self.h.column(v).clone_owned();
        let p = self.num_vars();
        for j in 0..p {
            for i in 0..p {
                let corr = hu[i] * (m00 * hu[j] + m01 * hv[j]) + hv[i] * (m01 * hu[j] + m11 * hv[j]);
                self.h[(i, j)] -= corr;
            }
        }
        let dec = &mut self.state.decomp;
        let x = if include { dec.gamma[(u, v)] + delta } else { 0.0 };
        dec.gamma[(u, v)] = x;
        dec.gamma[(v, u)] = x;
        dec.inclusion[(u, v)] = include;
        dec.inclusion[(v, u)] = include;
        self.log_det_gamma += dlogdet;
        self.state.loglik += dll;
    }

    /// Spike/slab toggle for one pair. Given the rest of `Γ`, the entry is
    /// zero with probability `1 − π` and otherwise uniform on its feasible
    /// interval; the slab value is proposed from that same uniform law, so
    /// only the inclusion odds and the likelihood enter the ratio.
    fn toggle_pair(&mut self, u: usize, v: usize) {
        let pi = self.config.slab_prob;
        let (lo, hi) = self.feasible_interval(u, v);
        let width = hi - lo;
        let log_prior_ratio = pi.ln() - (1.0 - pi).ln();
        let x = self.state.decomp.gamma[(u, v)];
        if self.state.decomp.inclusion[(u, v)] {
            if !(lo < 0.0 && 0.0 < hi) {
                self.toggle_acc.record(false);
                return;
            }
            match self.pair_delta(u, v, -x) {
                Some((dll, dld)) if mh_accept(dll - log_prior_ratio, &mut self.rng) => {
                    self.toggle_acc.record(true);
                    self.commit_pair(u, v, -x, dll, dld, false);
                }
                _ => self.toggle_acc.record(false),
            }
        } else {
            let x_new = lo + width * self.rng.random::<f64>();
            match self.pair_delta(u, v, x_new) {
                Some((dll, dld)) if x_new != 0.0 && mh_accept(dll + log_prior_ratio, &mut self.rng) => {
                    self.toggle_acc.record(true);
                    self.commit_pair(u, v, x_new, dll, dld, true);
                }
                _ => self.toggle_acc.record(false),
            }
        }
    }

    /// Gaussian random walk on an included entry.
    fn refresh_pair(&mut self, u: usize, v: usize) {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        let delta = self.slab_step.step() * z;
        let x_new = self.state.decomp.gamma[(u, v)] + delta;
        let accepted = match self.pair_delta(u, v, delta) {
            Some((dll, dld)) if x_new != 0.0 && mh_accept(dll, &mut self.rng) => {
                self.commit_pair(u, v, delta, dll, dld, true);
                true
            }
            _ => false,
        };
        self.slab_step.record(accepted);
    }

    /// Toggle, then (if included) a within-slab step, for every pair; `Γ⁻¹`
    /// is refactorised at the end, which also re-verifies positive
    /// definiteness.
    pub fn update_gamma(&mut self) -> Result<()> {
        let p = self.num_vars();
        for u in 0..p {
            for v in (u + 1)..p {
                self.toggle_pair(u, v);
                if self.state.decomp.inclusion[(u, v)] {
                    self.refresh_pair(u, v);
                }
            }
        }
        self.refactor()
    }

    fn refactor(&mut self) -> Result<()> {
        self.h = spd_inverse(&self.state.decomp.gamma)?;
        self.log_det_gamma = spd_log_det(&self.state.decomp.gamma)?;
        Ok(())
    }

    /// Recomputes the log-likelihood from scratch and compares it with the
    /// cached value.
    pub fn check_drift(&mut self) -> Result<()> {
        let cached = self.state.loglik;
        let recomputed = self.full_loglik()?;
        let log_det = spd_log_det(&self.state.decomp.gamma)?;
        if (log_det - self.log_det_gamma).abs() > 1e-8 * log_det.abs().max(1.0) {
            return Err(Error::CacheDrift {
                cached: self.log_det_gamma,
                recomputed: log_det,
            });
        }
        if (cached - recomputed).abs() > 1e-8 * recomputed.abs().max(1.0) {
            return Err(Error::CacheDrift { cached, recomputed });
        }
        self.state.loglik = recomputed;
        Ok(())
    }

    /// `ω`, then continuous diagonals, then `Γ`. Step sizes freeze when the
    /// burn-in ends.
    pub fn sweep(&mut self) -> Result<()> {
        let it = self.sweep;
        if it == self.config.burnin {
            self.diag_steps.iter_mut().for_each(AdaptiveStep::freeze);
            self.slab_step.freeze();
            self.toggle_acc = AcceptanceCounter::default();
        }
        self.update_omega().map_err(|e| e.at(it))?;
        self.update_theta().map_err(|e| e.at(it))?;
        self.update_gamma().map_err(|e| e.at(it))?;
        self.sweep += 1;
        let every = self.config.drift_check_every;
        if every > 0 && self.sweep.is_multiple_of(every) {
            self.check_drift().map_err(|e| e.at(it))?;
        }
        Ok(())
    }

    pub fn diagnostics(&self) -> MixedDiagnostics {
        let d = self.num_discrete;
        MixedDiagnostics {
            omega_acceptance: self.diag_steps[..d].iter().map(AdaptiveStep::acceptance_rate).collect(),
            theta_acceptance: self.diag_steps[d..].iter().map(AdaptiveStep::acceptance_rate).collect(),
            diagonal_steps: self.diag_steps.iter().map(AdaptiveStep::step).collect(),
            toggle_acceptance: self.toggle_acc.rate(),
            slab_acceptance: self.slab_step.acceptance_rate(),
            slab_step: self.slab_step.step(),
        }
    }

    /// Runs all configured sweeps, accumulating inclusion indicators, `Ω`
    /// and `ω` after burn-in.
    pub fn run(mut self) -> Result<MixedRun> {
        let p = self.num_vars();
        let mut acc = SummaryAccumulator::new(p, self.num_discrete);
        while self.sweep < self.config.iters {
            let it = self.sweep;
            self.sweep()?;
            acc.push_loglik(self.state.loglik);
            if it >= self.config.burnin {
                let dec = &self.state.decomp;
                let edges = dec.inclusion.map(|b| if b { 1.0 } else { 0.0 });
                acc.add_parts(&edges, &dec.precision(), &self.state.omega);
            }
        }
        Ok(MixedRun {
            accumulator: acc,
            diagnostics: self.diagnostics(),
            final_state: self.state,
        })
    }
}

/// Runs one chain of the mixed model.
pub fn run_mixed_chain(data: &MixedData, config: &MixedConfig) -> Result<MixedRun> {
    MixedSampler::new(data, config)?.run()
}
