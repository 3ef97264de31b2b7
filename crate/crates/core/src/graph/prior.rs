use nalgebra::DMatrix;

use super::DecomposableGraph;
use crate::{Error, Result};

/// Per-pair edge inclusion weights `w_uv ∈ (0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgePriorWeights {
    weights: DMatrix<f64>,
}

impl EdgePriorWeights {
    /// Validates symmetry and that off-diagonal entries lie strictly in (0, 1).
    pub fn new(weights: DMatrix<f64>) -> Result<Self> {
        if !weights.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "edge weights must be square, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        let q = weights.nrows();
        for i in 0..q {
            for j in (i + 1)..q {
                let w = weights[(i, j)];
                if w != weights[(j, i)] {
                    return Err(Error::InvalidParams(format!(
                        "edge weights not symmetric at ({i}, {j})"
                    )));
                }
                if !(w > 0.0 && w < 1.0) {
                    return Err(Error::InvalidParams(format!(
                        "edge weight ({i}, {j}) = {w} outside (0, 1)"
                    )));
                }
            }
        }
        Ok(EdgePriorWeights { weights })
    }

    pub fn uniform(num_vertices: usize, w: f64) -> Result<Self> {
        Self::new(DMatrix::from_element(num_vertices, num_vertices, w))
    }

    pub fn num_vertices(&self) -> usize {
        self.weights.nrows()
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.weights[(u, v)]
    }

    /// Prior log-odds `log(w / (1 − w))` of including edge `{u, v}`.
    #[inline]
    pub fn log_odds(&self, u: usize, v: usize) -> f64 {
        let w = self.weights[(u, v)];
        w.ln() - (-w).ln_1p()
    }
}

/// Unnormalised log prior `Σ_E log w + Σ_{not E} log(1 − w)`.
pub fn graph_log_prior(graph: &DecomposableGraph, weights: &EdgePriorWeights) -> f64 {
    let q = graph.num_vertices();
    let mut total = 0.0;
    for u in 0..q {
        for v in (u + 1)..q {
            let w = weights.get(u, v);
            total += if graph.has_edge(u, v) {
                w.ln()
            } else {
                (-w).ln_1p()
            };
        }
    }
    total
}
