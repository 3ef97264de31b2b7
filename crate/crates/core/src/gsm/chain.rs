use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::transform::{check_scales, transform, RawStats};
use super::GsmConfig;
use crate::dist::{sample_hiw, sample_hiw_precision, HiwDraw, HiwParams, HmtModel};
use crate::graph::{propose_from, DecomposableGraph, LegalMoves, MoveKind};
use crate::mcmc::{mh_accept, AcceptanceCounter, AdaptiveStep};
use crate::summary::SummaryAccumulator;
use crate::{ChainRng, Error, Result};

/// Current point of the continuous-model chain.
#[derive(Clone, Debug, PartialEq)]
pub struct GsmState {
    pub graph: DecomposableGraph,
    pub scales: Vec<f64>,
    /// Most recent conditional draw of the precision of the transformed data.
    pub precision: Option<DMatrix<f64>>,
    /// Cached `log f(transformed data | graph)` under the hyper-matrix-t law.
    pub log_marginal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GsmDiagnostics {
    pub graph_acceptance: f64,
    /// Post-burn-in acceptance of each scale update (`None` for fixed margins).
    pub scale_acceptance: Vec<Option<f64>>,
    pub scale_steps: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct GsmRun {
    pub accumulator: SummaryAccumulator,
    pub diagnostics: GsmDiagnostics,
    pub final_state: GsmState,
}

/// Owns one chain: the state, the transformed cross-product, per-term caches
/// of the clique and separator factors, and the tuning state.
pub struct GsmSampler<'a> {
    config: &'a GsmConfig,
    stats: RawStats,
    loc: Vec<f64>,
    model: HmtModel,
    state: GsmState,
    legal: LegalMoves,
    clique_terms: Vec<f64>,
    sep_terms: Vec<f64>,
    cliques_of: Vec<Vec<usize>>,
    seps_of: Vec<Vec<usize>>,
    steps: Vec<AdaptiveStep>,
    graph_acc: AcceptanceCounter,
    sweep: usize,
    rng: ChainRng,
}

fn is_ill_conditioned(e: &Error) -> bool {
    matches!(e, Error::IllConditioned { .. })
}

impl<'a> GsmSampler<'a> {
    /// Starts from the empty graph with `d_i` chosen so that each transformed
    /// column's variance matches the prior mean of `Σ_ii` (`d_i = 1` for
    /// degenerate margins).
    pub fn new(data: &DMatrix<f64>, config: &'a GsmConfig) -> Result<Self> {
        config.validate()?;
        let q = config.num_vars();
        if data.ncols() != q {
            return Err(Error::DimensionMismatch(format!(
                "data has {} columns, configuration {q}",
                data.ncols()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("data contain non-finite values".into()));
        }
        let stats = RawStats::new(data);
        let n = stats.n;
        let prior_var = if config.b > 2.0 {
            config.rho / (config.b - 2.0)
        } else {
            config.rho
        };
        let scales: Vec<f64> = config
            .margins
            .iter()
            .enumerate()
            .map(|(i, m)| {
                if m.mixing.is_degenerate() || n < 2 {
                    return 1.0;
                }
                let mean = stats.sums[i] / n as f64;
                let var = (stats.gram[(i, i)] / n as f64 - mean * mean).max(1e-12);
                var / prior_var
            })
            .collect();
        let loc: Vec<f64> = config
            .margins
            .iter()
            .zip(&scales)
            .map(|(m, &d)| m.location(d))
            .collect();
        let model = HmtModel::new(stats.transformed_gram(&loc, &scales), n, config.b, config.rho)?;
        let graph = DecomposableGraph::empty(q);
        let legal = LegalMoves::of(&graph);
        let steps = (0..q)
            .map(|_| AdaptiveStep::new(config.scale_step, AdaptiveStep::DEFAULT_TARGET))
            .collect();
        let mut sampler = GsmSampler {
            config,
            stats,
            loc,
            model,
            state: GsmState {
                graph,
                scales,
                precision: None,
                log_marginal: 0.0,
            },
            legal,
            clique_terms: Vec::new(),
            sep_terms: Vec::new(),
            cliques_of: Vec::new(),
            seps_of: Vec::new(),
            steps,
            graph_acc: AcceptanceCounter::default(),
            sweep: 0,
            rng: crate::rng_from_seed(config.seed),
        };
        sampler.rebuild_terms()?;
        Ok(sampler)
    }

    /// Replaces the current graph (e.g. to start from a known structure).
    pub fn set_graph(&mut self, graph: DecomposableGraph) -> Result<()> {
        if graph.num_vertices() != self.config.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "graph has {} vertices, configuration {}",
                graph.num_vertices(),
                self.config.num_vars()
            )));
        }
        self.legal = LegalMoves::of(&graph);
        self.state.graph = graph;
        self.rebuild_terms()
    }

    pub fn state(&self) -> &GsmState {
        &self.state
    }

    pub fn sweeps_done(&self) -> usize {
        self.sweep
    }

    /// `log p(Y | G, d)`: the hyper-matrix-t marginal of the transformed data
    /// plus the Jacobian `−(n/2) Σ log d_i`.
    pub fn log_likelihood(&self) -> f64 {
        let n = self.stats.n as f64;
        self.state.log_marginal - 0.5 * n * self.state.scales.iter().map(|d| d.ln()).sum::<f64>()
    }

    fn rebuild_terms(&mut self) -> Result<()> {
        let q = self.config.num_vars();
        let graph = &self.state.graph;
        self.clique_terms = graph
            .cliques()
            .iter()
            .map(|c| self.model.term(c))
            .collect::<Result<_>>()?;
        self.sep_terms = graph
            .separators()
            .iter()
            .map(|s| self.model.term(s))
            .collect::<Result<_>>()?;
        self.cliques_of = vec![Vec::new(); q];
        for (k, c) in graph.cliques().iter().enumerate() {
            for &v in c {
                self.cliques_of[v].push(k);
            }
        }
        self.seps_of = vec![Vec::new(); q];
        for (k, s) in graph.separators().iter().enumerate() {
            for &v in s {
                self.seps_of[v].push(k);
            }
        }
        self.state.log_marginal = self.total();
        Ok(())
    }

    fn total(&self) -> f64 {
        self.clique_terms.iter().sum::<f64>() - self.sep_terms.iter().sum::<f64>()
    }

    /// `graph_moves_per_sweep` Metropolis-Hastings steps on the graph.
    pub fn update_graph(&mut self) -> Result<()> {
        if self.config.num_vars() < 2 {
            return Ok(());
        }
        for _ in 0..self.config.graph_moves_per_sweep {
            self.graph_step()?;
        }
        Ok(())
    }

    fn graph_step(&mut self) -> Result<()> {
        let proposal = propose_from(&self.state.graph, &self.legal, &mut self.rng)?;
        let mv = proposal.edge_move;
        let likelihood = match mv.kind {
            MoveKind::Add => self.model.add_edge_ratio(&self.state.graph, mv.u, mv.v),
            MoveKind::Delete => self.model.add_edge_ratio(&proposal.graph, mv.u, mv.v).map(|r| -r),
        };
        let likelihood = match likelihood {
            Ok(v) => v,
            Err(e) if is_ill_conditioned(&e) => f64::NEG_INFINITY,
            Err(e) => return Err(e),
        };
        let log_odds = self.config.edge_weights.log_odds(mv.u, mv.v);
        let prior = if mv.kind == MoveKind::Add { log_odds } else { -log_odds };
        let accepted = mh_accept(likelihood + prior + mv.log_proposal_ratio(), &mut self.rng);
        self.graph_acc.record(accepted);
        if accepted {
            self.state.graph = proposal.graph;
            self.legal = proposal.legal;
            self.rebuild_terms()?;
        }
        Ok(())
    }

    /// One random-walk step on `log d_i` for each non-degenerate margin, in
    /// index order.
    pub fn update_scales(&mut self) -> Result<()> {
        for i in 0..self.config.num_vars() {
            if !self.config.margins[i].mixing.is_degenerate() {
                self.scale_step(i)?;
            }
        }
        Ok(())
    }

    fn set_scale(&mut self, i: usize, d: f64) {
        self.state.scales[i] = d;
        self.loc[i] = self.config.margins[i].location(d);
        let q = self.config.num_vars();
        for j in 0..q {
            let t = self
                .stats
                .transformed_entry(i, j, &self.loc, &self.state.scales);
            let g = self.model.gram_mut();
            g[(i, j)] = t;
            g[(j, i)] = t;
        }
    }

    fn affected_terms(&self, i: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let graph = &self.state.graph;
        let c = self.cliques_of[i]
            .iter()
            .map(|&k| self.model.term(&graph.cliques()[k]))
            .collect::<Result<_>>()?;
        let s = self.seps_of[i]
            .iter()
            .map(|&k| self.model.term(&graph.separators()[k]))
            .collect::<Result<_>>()?;
        Ok((c, s))
    }

    fn scale_step(&mut self, i: usize) -> Result<()> {
        let family = self.config.margins[i].mixing;
        let d = self.state.scales[i];
        let z: f64 = StandardNormal.sample(&mut self.rng);
        let log_jump = self.steps[i].step() * z;
        let d_new = d * log_jump.exp();
        if !(d_new > 0.0 && d_new.is_finite()) {
            self.steps[i].record(false);
            return Ok(());
        }
        let old_c: Vec<f64> = self.cliques_of[i].iter().map(|&k| self.clique_terms[k]).collect();
        let old_s: Vec<f64> = self.seps_of[i].iter().map(|&k| self.sep_terms[k]).collect();
        self.set_scale(i, d_new);
        let proposed = match self.affected_terms(i) {
            Ok(t) => Some(t),
            Err(e) if is_ill_conditioned(&e) => None,
            Err(e) => return Err(e),
        };
        let n = self.stats.n as f64;
        let log_ratio = match &proposed {
            None => f64::NEG_INFINITY,
            Some((c, s)) => {
                let delta = c.iter().sum::<f64>() - s.iter().sum::<f64>() - old_c.iter().sum::<f64>()
                    + old_s.iter().sum::<f64>();
                delta - 0.5 * n * log_jump
                    + family.log_density(d_new)?
                    - family.log_density(d)?
                    + log_jump
            }
        };
        let accepted = mh_accept(log_ratio, &mut self.rng);
        self.steps[i].record(accepted);
        if accepted {
            let (c, s) = proposed.expect("accepted proposals are finite");
            for (&k, v) in self.cliques_of[i].iter().zip(c) {
                self.clique_terms[k] = v;
            }
            for (&k, v) in self.seps_of[i].iter().zip(s) {
                self.sep_terms[k] = v;
            }
            self.state.log_marginal = self.total();
        } else {
            self.set_scale(i, d);
        }
        Ok(())
    }

    /// Draws the precision of the transformed data from its conditional
    /// posterior `HIW_G(b + n, ρI + T)` and stores it in the state.
    pub fn sample_precision(&mut self) -> Result<&DMatrix<f64>> {
        let q = self.config.num_vars();
        let params = HiwParams::isotropic(q, self.config.b, self.config.rho)?
            .posterior(self.stats.n, self.model.gram())?;
        let k = sample_hiw_precision(&self.state.graph, &params, &mut self.rng)?;
        Ok(self.state.precision.insert(k))
    }

    /// Recomputes the cross-product and every term from scratch and checks
    /// the cached log marginal against it.
    pub fn check_drift(&mut self) -> Result<()> {
        let cached = self.state.log_marginal;
        *self.model.gram_mut() = self.stats.transformed_gram(&self.loc, &self.state.scales);
        self.rebuild_terms()?;
        let recomputed = self.state.log_marginal;
        if (cached - recomputed).abs() > 1e-8 * recomputed.abs().max(1.0) {
            return Err(Error::CacheDrift { cached, recomputed });
        }
        Ok(())
    }

    /// One sweep: graph moves, then scale moves. Step sizes freeze when the
    /// burn-in ends.
    pub fn sweep(&mut self) -> Result<()> {
        let it = self.sweep;
        if it == self.config.burnin {
            self.steps.iter_mut().for_each(AdaptiveStep::freeze);
            self.graph_acc = AcceptanceCounter::default();
        }
        self.update_graph().map_err(|e| e.at(it))?;
        self.update_scales().map_err(|e| e.at(it))?;
        self.sweep += 1;
        let every = self.config.drift_check_every;
        if every > 0 && self.sweep.is_multiple_of(every) {
            self.check_drift().map_err(|e| e.at(it))?;
        }
        Ok(())
    }

    pub fn diagnostics(&self) -> GsmDiagnostics {
        GsmDiagnostics {
            graph_acceptance: self.graph_acc.rate(),
            scale_acceptance: self
                .config
                .margins
                .iter()
                .zip(&self.steps)
                .map(|(m, s)| (!m.mixing.is_degenerate()).then(|| s.acceptance_rate()))
                .collect(),
            scale_steps: self.steps.iter().map(AdaptiveStep::step).collect(),
        }
    }

    /// Runs all configured sweeps, accumulating post-burn-in draws.
    pub fn run(mut self) -> Result<GsmRun> {
        let q = self.config.num_vars();
        let mut acc = SummaryAccumulator::new(q, q);
        let zeros = DMatrix::zeros(q, q);
        while self.sweep < self.config.iters {
            let it = self.sweep;
            self.sweep()?;
            acc.push_loglik(self.log_likelihood());
            if it >= self.config.burnin {
                if self.config.sample_precision {
                    self.sample_precision().map_err(|e| e.at(it))?;
                }
                let precision = self.state.precision.as_ref().unwrap_or(&zeros);
                acc.add_parts(
                    &self.state.graph.inclusion_matrix(),
                    precision,
                    &self.state.scales,
                );
            }
        }
        Ok(GsmRun {
            accumulator: acc,
            diagnostics: self.diagnostics(),
            final_state: self.state,
        })
    }
}

/// Runs one chain of the continuous model.
pub fn run_chain(data: &DMatrix<f64>, config: &GsmConfig) -> Result<GsmRun> {
    GsmSampler::new(data, config)?.run()
}

/// Draws `Σ` (and its precision) from `HIW_G(b + n, ρI + TᵀT)` where `T` is
/// the data transformed with the state's scales.
pub fn sample_sigma_posterior<R: Rng + ?Sized>(
    data: &DMatrix<f64>,
    state: &GsmState,
    config: &GsmConfig,
    rng: &mut R,
) -> Result<HiwDraw> {
    check_scales(&state.scales)?;
    let t = transform(data, &state.scales, &config.margins)?;
    let params = HiwParams::isotropic(config.num_vars(), config.b, config.rho)?
        .posterior(t.nrows(), &(t.transpose() * &t))?;
    sample_hiw(&state.graph, &params, rng)
}
