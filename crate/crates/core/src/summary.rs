//! Posterior sample accumulation and summaries shared by both models.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// One retained post-burn-in draw.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorSample {
    /// Symmetric 0/1 edge (or inclusion) indicators; the diagonal is ignored.
    pub edges: DMatrix<f64>,
    pub precision: DMatrix<f64>,
    /// Per-variable scales (`d` for the continuous model, `ω` for the mixed one).
    pub scales: DVector<f64>,
}

/// Running sums over retained draws plus per-chain log-likelihood traces.
///
/// [`merge`](Self::merge) pools two accumulators; pooling in a fixed order
/// gives reproducible floating-point results.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryAccumulator {
    count: usize,
    edge_counts: DMatrix<f64>,
    precision_sum: DMatrix<f64>,
    scale_sum: DVector<f64>,
    traces: Vec<Vec<f64>>,
}

impl SummaryAccumulator {
    pub fn new(num_vars: usize, num_scales: usize) -> Self {
        SummaryAccumulator {
            count: 0,
            edge_counts: DMatrix::zeros(num_vars, num_vars),
            precision_sum: DMatrix::zeros(num_vars, num_vars),
            scale_sum: DVector::zeros(num_scales),
            traces: vec![Vec::new()],
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn add(&mut self, sample: &PosteriorSample) {
        self.add_parts(&sample.edges, &sample.precision, sample.scales.as_slice());
    }

    pub fn add_parts(&mut self, edges: &DMatrix<f64>, precision: &DMatrix<f64>, scales: &[f64]) {
        self.count += 1;
        self.edge_counts += edges;
        self.precision_sum += precision;
        for (acc, s) in self.scale_sum.iter_mut().zip(scales) {
            *acc += s;
        }
    }

    /// Appends one raw log-likelihood value to the current chain's trace.
    pub fn push_loglik(&mut self, value: f64) {
        self.traces.last_mut().expect("at least one trace").push(value);
    }

    pub fn traces(&self) -> &[Vec<f64>] {
        &self.traces
    }

    pub fn merge(&mut self, other: &SummaryAccumulator) -> Result<()> {
        if self.edge_counts.shape() != other.edge_counts.shape()
            || self.scale_sum.len() != other.scale_sum.len()
        {
            return Err(Error::DimensionMismatch(
                "cannot merge accumulators of different dimensions".into(),
            ));
        }
        self.count += other.count;
        self.edge_counts += &other.edge_counts;
        self.precision_sum += &other.precision_sum;
        self.scale_sum += &other.scale_sum;
        self.traces.extend(other.traces.iter().cloned());
        Ok(())
    }

    pub fn summarize(&self, threshold: f64) -> Result<PosteriorSummary> {
        if self.count == 0 {
            return Err(Error::EmptySampleSet);
        }
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::InvalidParams(format!(
                "threshold must lie in (0, 1), got {threshold}"
            )));
        }
        let n = self.count as f64;
        let q = self.edge_counts.nrows();
        let mut edge_prob = &self.edge_counts / n;
        for i in 0..q {
            edge_prob[(i, i)] = 1.0;
        }
        let mean_precision = &self.precision_sum / n;
        let sign_class = classify_signs(&edge_prob, &mean_precision, threshold);
        Ok(PosteriorSummary {
            num_samples: self.count,
            threshold,
            edge_prob,
            mean_precision,
            sign_class,
            scale_means: &self.scale_sum / n,
            loglik_trace: self.traces.clone(),
        })
    }
}

/// `sign(mean precision)` where the edge probability exceeds the threshold
/// (always on the diagonal), 0 elsewhere.
pub fn classify_signs(
    edge_prob: &DMatrix<f64>,
    mean_precision: &DMatrix<f64>,
    threshold: f64,
) -> DMatrix<i8> {
    let q = edge_prob.nrows();
    DMatrix::from_fn(q, q, |i, j| {
        if i != j && edge_prob[(i, j)] <= threshold {
            0
        } else {
            let m = mean_precision[(i, j)];
            if m > 0.0 {
                1
            } else if m < 0.0 {
                -1
            } else {
                0
            }
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorSummary {
    pub num_samples: usize,
    pub threshold: f64,
    /// Symmetric, diagonal 1 by convention.
    pub edge_prob: DMatrix<f64>,
    pub mean_precision: DMatrix<f64>,
    pub sign_class: DMatrix<i8>,
    pub scale_means: DVector<f64>,
    /// One raw per-sweep trace per pooled chain.
    pub loglik_trace: Vec<Vec<f64>>,
}

impl PosteriorSummary {
    /// Edges `(u, v)`, `u < v`, whose probability exceeds the threshold.
    pub fn selected_edges(&self) -> Vec<(usize, usize)> {
        let q = self.edge_prob.nrows();
        let mut out = Vec::new();
        for u in 0..q {
            for v in (u + 1)..q {
                if self.edge_prob[(u, v)] > self.threshold {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// Summarises a list of retained draws.
pub fn summarize(samples: &[PosteriorSample], threshold: f64) -> Result<PosteriorSummary> {
    let first = samples.first().ok_or(Error::EmptySampleSet)?;
    let mut acc = SummaryAccumulator::new(first.edges.nrows(), first.scales.len());
    for s in samples {
        acc.add(s);
    }
    acc.summarize(threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(edge: f64, k01: f64) -> PosteriorSample {
        let mut edges = DMatrix::zeros(2, 2);
        edges[(0, 1)] = edge;
        edges[(1, 0)] = edge;
        let precision = DMatrix::from_row_slice(2, 2, &[2.0, k01, k01, 2.0]);
        PosteriorSample {
            edges,
            precision,
            scales: DVector::from_vec(vec![1.0, 3.0]),
        }
    }

    #[test]
    fn single_negative_edge() {
        let s = summarize(&[sample(1.0, -0.5)], 0.5).unwrap();
        assert_eq!(s.sign_class[(0, 1)], -1);
        assert_eq!(s.sign_class[(0, 0)], 1);
        assert_eq!(s.edge_prob[(1, 1)], 1.0);
        assert_eq!(s.selected_edges(), vec![(0, 1)]);
    }

    #[test]
    fn below_threshold_is_zero() {
        let mut v = vec![sample(1.0, -3.0); 2];
        v.extend(vec![sample(0.0, 0.0); 3]);
        let s = summarize(&v, 0.5).unwrap();
        assert!((s.edge_prob[(0, 1)] - 0.4).abs() < 1e-15);
        assert_eq!(s.sign_class[(0, 1)], 0);
    }

    #[test]
    fn empty_and_merge() {
        assert_eq!(summarize(&[], 0.5).unwrap_err(), Error::EmptySampleSet);
        let mut a = SummaryAccumulator::new(2, 2);
        a.add(&sample(1.0, 1.0));
        a.push_loglik(-1.0);
        let mut b = SummaryAccumulator::new(2, 2);
        b.add(&sample(0.0, 0.0));
        b.push_loglik(-2.0);
        a.merge(&b).unwrap();
        let s = a.summarize(0.5).unwrap();
        assert_eq!(s.num_samples, 2);
        assert_eq!(s.loglik_trace, vec![vec![-1.0], vec![-2.0]]);
        assert!((s.scale_means[1] - 3.0).abs() < 1e-15);
    }
}
