//! Ground-truth precision matrices, data generators and sign-detection
//! tables for simulation studies.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dist::{sample_pg, MixingFamily};
use crate::graph::{can_add_edge, DecomposableGraph, LegalMoves};
use crate::gsm::MarginSpec;
use crate::linalg::is_positive_definite;
use crate::{Error, Result};

pub mod sign;

/// Shape of a ground-truth precision matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruthKind {
    /// Diagonal `v`, first off-diagonal `frac1·v`, second `frac2·v`.
    Banded { v: f64, frac1: f64, frac2: f64 },
    /// Unit diagonal; the leading `size × size` block has off-diagonal
    /// entries `±magnitude` with alternating signs.
    Block { size: usize, magnitude: f64 },
    /// Random decomposable support with the given fractions of positive and
    /// negative off-diagonal pairs; entries `±0.3`, diagonal set for strict
    /// diagonal dominance.
    RandomSparse { pos_frac: f64, neg_frac: f64 },
}

/// Off-diagonal block assignment, 0-based half-open ranges. The mirrored
/// block is set as well.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub rows: Range<usize>,
    pub cols: Range<usize>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthSpec {
    #[serde(flatten)]
    pub kind: TruthKind,
    pub q: usize,
    #[serde(default)]
    pub extra_blocks: Vec<BlockSpec>,
}

impl TruthSpec {
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DMatrix<f64>> {
        let mut m = match self.kind {
            TruthKind::Banded { v, frac1, frac2 } => make_banded_precision(self.q, v, frac1, frac2)?,
            TruthKind::Block { size, magnitude } => make_block_precision(self.q, size, magnitude)?,
            TruthKind::RandomSparse { pos_frac, neg_frac } => {
                make_random_sparse_precision(self.q, pos_frac, neg_frac, rng)?
            }
        };
        for b in &self.extra_blocks {
            m = add_block(&m, b.rows.clone(), b.cols.clone(), b.value)?;
        }
        Ok(m)
    }
}

fn check_dominance(m: &DMatrix<f64>) -> Result<()> {
    for i in 0..m.nrows() {
        let off: f64 = (0..m.ncols()).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
        if !(m[(i, i)] > off) {
            return Err(Error::NotDiagonallyDominant { row: i });
        }
    }
    Ok(())
}

pub fn make_banded_precision(q: usize, v: f64, frac1: f64, frac2: f64) -> Result<DMatrix<f64>> {
    let m = DMatrix::from_fn(q, q, |i, j| match i.abs_diff(j) {
        0 => v,
        1 => frac1 * v,
        2 => frac2 * v,
        _ => 0.0,
    });
    check_dominance(&m)?;
    Ok(m)
}

pub fn make_block_precision(q: usize, size: usize, magnitude: f64) -> Result<DMatrix<f64>> {
    if size > q {
        return Err(Error::InvalidParams(format!("block size {size} exceeds q = {q}")));
    }
    let m = DMatrix::from_fn(q, q, |i, j| {
        if i == j {
            1.0
        } else if i < size && j < size {
            if (i + j) % 2 == 0 {
                magnitude
            } else {
                -magnitude
            }
        } else {
            0.0
        }
    });
    check_dominance(&m)?;
    Ok(m)
}

/// Grows a decomposable support by random legal edge additions until it
/// holds the requested number of pairs, then signs and scales the entries.
pub fn make_random_sparse_precision<R: Rng + ?Sized>(
    q: usize,
    pos_frac: f64,
    neg_frac: f64,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    if !(pos_frac >= 0.0 && neg_frac >= 0.0 && pos_frac + neg_frac <= 1.0) {
        return Err(Error::InvalidParams(
            "edge fractions must be non-negative and sum to at most 1".into(),
        ));
    }
    let pairs = q * q.saturating_sub(1) / 2;
    let target = ((pos_frac + neg_frac) * pairs as f64).round() as usize;
    let mut graph = DecomposableGraph::empty(q);
    while graph.num_edges() < target {
        let adds = LegalMoves::of(&graph).adds;
        if adds.is_empty() {
            break;
        }
        let (u, v) = adds[rng.random_range(0..adds.len())];
        debug_assert!(can_add_edge(&graph, u, v));
        graph = graph.with_edge_toggled(u, v)?;
    }
    let p_pos = if pos_frac + neg_frac > 0.0 {
        pos_frac / (pos_frac + neg_frac)
    } else {
        0.0
    };
    let mut m = DMatrix::zeros(q, q);
    for (u, v) in graph.edges() {
        let val = if rng.random::<f64>() < p_pos { 0.3 } else { -0.3 };
        m[(u, v)] = val;
        m[(v, u)] = val;
    }
    for i in 0..q {
        let off: f64 = m.row(i).iter().map(|x: &f64| x.abs()).sum();
        m[(i, i)] = off + 0.5;
    }
    Ok(m)
}

/// Sets `matrix[rows, cols]` and its mirror to `value`, requiring the block
/// to stay off the diagonal and the result to be positive definite.
pub fn add_block(
    matrix: &DMatrix<f64>,
    rows: Range<usize>,
    cols: Range<usize>,
    value: f64,
) -> Result<DMatrix<f64>> {
    let q = matrix.nrows();
    if rows.end > q || cols.end > q || rows.start > rows.end || cols.start > cols.end {
        return Err(Error::InvalidParams(format!(
            "block {rows:?} x {cols:?} outside a {q}x{q} matrix"
        )));
    }
    if rows.start < cols.end && cols.start < rows.end {
        return Err(Error::BlockOverlapsDiagonal);
    }
    let mut m = matrix.clone();
    for r in rows.clone() {
        for c in cols.clone() {
            m[(r, c)] = value;
            m[(c, r)] = value;
        }
    }
    if !is_positive_definite(&m) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(m)
}

/// Exact sign pattern of a matrix.
pub fn sign_matrix(m: &DMatrix<f64>) -> DMatrix<i8> {
    m.map(|x| {
        if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            0
        }
    })
}

/// Draws `n` rows with covariance `precision⁻¹`.
pub fn sample_gaussian_rows<R: Rng + ?Sized>(
    n: usize,
    precision: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let q = precision.nrows();
    let l = precision
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?
        .unpack();
    let lt = l.transpose();
    let mut out = DMatrix::zeros(n, q);
    for r in 0..n {
        let e = DVector::from_fn(q, |_, _| StandardNormal.sample(rng));
        let z = lt
            .solve_upper_triangular(&e)
            .ok_or(Error::NotPositiveDefinite)?;
        out.row_mut(r).copy_from(&z.transpose());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GsmSimulation {
    pub data: DMatrix<f64>,
    /// The latent Gaussian rows before scaling.
    pub latent: DMatrix<f64>,
    pub scales: Vec<f64>,
}

/// Simulates `y_i = √d_i z_i + α_i + β_i d_i` with `z` rows `N(0, precision⁻¹)`
/// and `d_i` drawn once per column from its mixing law.
pub fn simulate_gsm_data(
    n: usize,
    precision: &DMatrix<f64>,
    margins: &[MarginSpec],
    seed: u64,
) -> Result<GsmSimulation> {
    let q = precision.nrows();
    if margins.len() != q {
        return Err(Error::DimensionMismatch(format!(
            "{} margins for a {q}-variable precision",
            margins.len()
        )));
    }
    let mut rng = crate::rng_from_seed(seed);
    let latent = sample_gaussian_rows(n, precision, &mut rng)?;
    let scales = margins
        .iter()
        .map(|m| m.mixing.sample(&mut rng))
        .collect::<Result<Vec<_>>>()?;
    let data = crate::gsm::untransform(&latent, &scales, margins)?;
    Ok(GsmSimulation {
        data,
        latent,
        scales,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedSimulation {
    /// First `num_discrete` columns rounded to integers.
    pub values: DMatrix<f64>,
    pub num_discrete: usize,
    pub omega: Vec<f64>,
    /// Precision actually used: the template with `1/ω_j` on the discrete diagonal.
    pub precision: DMatrix<f64>,
}

/// Maximum number of `ω` redraws when the substituted precision is not
/// positive definite.
pub const MAX_OMEGA_REDRAWS: usize = 10_000;

/// Draws `ω_j ~ PG(pg_shape, 0)` for the first `num_discrete` variables,
/// substitutes `1/ω_j` on those diagonal entries, draws Gaussian rows and
/// rounds the discrete columns to the nearest integer.
pub fn simulate_mixed_data(
    n: usize,
    template: &DMatrix<f64>,
    num_discrete: usize,
    pg_shape: u32,
    seed: u64,
) -> Result<MixedSimulation> {
    let p = template.nrows();
    if num_discrete > p {
        return Err(Error::DimensionMismatch(format!(
            "{num_discrete} discrete columns for {p} variables"
        )));
    }
    if pg_shape == 0 {
        return Err(Error::InvalidParams("PG shape must be >= 1".into()));
    }
    let mut rng = crate::rng_from_seed(seed);
    let mut attempt = 0;
    let (omega, precision) = loop {
        let omega: Vec<f64> = (0..num_discrete).map(|_| sample_pg(pg_shape, &mut rng)).collect();
        let mut m = template.clone();
        for (j, w) in omega.iter().enumerate() {
            m[(j, j)] = 1.0 / w;
        }
        if is_positive_definite(&m) {
            break (omega, m);
        }
        attempt += 1;
        if attempt >= MAX_OMEGA_REDRAWS {
            return Err(Error::NotPositiveDefinite);
        }
    };
    let mut values = sample_gaussian_rows(n, &precision, &mut rng)?;
    for j in 0..num_discrete {
        values.column_mut(j).apply(|x| *x = x.round());
    }
    Ok(MixedSimulation {
        values,
        num_discrete,
        omega,
        precision,
    })
}

/// Estimated versus true class counts over all entries (diagonal included).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignTable {
    pub est_zero: usize,
    pub true_zero: usize,
    pub est_pos: usize,
    pub true_pos: usize,
    pub est_neg: usize,
    pub true_neg: usize,
}

impl SignTable {
    /// Estimated over true count for (zero, positive, negative).
    pub fn ratios(&self) -> [f64; 3] {
        let r = |e: usize, t: usize| e as f64 / t as f64;
        [
            r(self.est_zero, self.true_zero),
            r(self.est_pos, self.true_pos),
            r(self.est_neg, self.true_neg),
        ]
    }

    pub fn total(&self) -> usize {
        self.true_zero + self.true_pos + self.true_neg
    }

    /// Sums the counts of two tables over the same truth.
    pub fn pooled(&self, other: &SignTable) -> SignTable {
        SignTable {
            est_zero: self.est_zero + other.est_zero,
            true_zero: self.true_zero + other.true_zero,
            est_pos: self.est_pos + other.est_pos,
            true_pos: self.true_pos + other.true_pos,
            est_neg: self.est_neg + other.est_neg,
            true_neg: self.true_neg + other.true_neg,
        }
    }
}

fn count_classes(m: &DMatrix<i8>) -> (usize, usize, usize) {
    let mut c = (0, 0, 0);
    for &x in m.iter() {
        match x.signum() {
            0 => c.0 += 1,
            1 => c.1 += 1,
            _ => c.2 += 1,
        }
    }
    c
}

/// Compares an estimated sign matrix with the signs of a true precision.
pub fn sign_detection_table(estimated: &DMatrix<i8>, truth: &DMatrix<f64>) -> Result<SignTable> {
    if estimated.shape() != truth.shape() {
        return Err(Error::DimensionMismatch(format!(
            "estimate is {:?}, truth is {:?}",
            estimated.shape(),
            truth.shape()
        )));
    }
    let (ez, ep, en) = count_classes(estimated);
    let (tz, tp, tn) = count_classes(&sign_matrix(truth));
    Ok(SignTable {
        est_zero: ez,
        true_zero: tz,
        est_pos: ep,
        true_pos: tp,
        est_neg: en,
        true_neg: tn,
    })
}

/// Reference simulation designs.
pub mod designs {
    use super::*;

    /// Banded `q = 50` truth with diagonal 3 and off-diagonals 0.75, −0.6.
    pub fn continuous_truth() -> TruthSpec {
        TruthSpec {
            kind: TruthKind::Banded {
                v: 3.0,
                frac1: 0.25,
                frac2: -0.2,
            },
            q: 50,
            extra_blocks: Vec::new(),
        }
    }

    /// Generator margins: exponential mixing with mean 10 on the first 25
    /// columns, inverse gamma (shape 3, scale 10) on the rest.
    pub fn continuous_generator_margins() -> Vec<MarginSpec> {
        (0..50)
            .map(|i| {
                MarginSpec::new(if i < 25 {
                    MixingFamily::Exponential { rate: 0.1 }
                } else {
                    MixingFamily::InverseGamma {
                        shape: 3.0,
                        scale: 10.0,
                    }
                })
            })
            .collect()
    }

    /// Fitting priors for the three compared models.
    #[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(rename_all = "snake_case")]
    pub enum ContinuousFit {
        /// Exponential (mean 5) on the first 25 margins, inverse gamma (2, 7) on the rest.
        Gsm,
        /// Inverse gamma (2, 7) on every margin.
        AltT,
        /// Gaussian margins.
        Ggm,
    }

    pub fn continuous_fit_margins(fit: ContinuousFit) -> Vec<MarginSpec> {
        let ig = MixingFamily::InverseGamma {
            shape: 2.0,
            scale: 7.0,
        };
        (0..50)
            .map(|i| {
                MarginSpec::new(match fit {
                    ContinuousFit::Gsm if i < 25 => MixingFamily::Exponential { rate: 0.2 },
                    ContinuousFit::Gsm | ContinuousFit::AltT => ig,
                    ContinuousFit::Ggm => MixingFamily::Degenerate,
                })
            })
            .collect()
    }

    /// Banded 50-variable truth (diagonal 4, off-diagonals ±0.8) plus a −0.7
    /// block between the first 5 and the last 6 variables.
    pub fn mixed_truth() -> TruthSpec {
        TruthSpec {
            kind: TruthKind::Banded {
                v: 4.0,
                frac1: 0.2,
                frac2: -0.2,
            },
            q: 50,
            extra_blocks: vec![BlockSpec {
                rows: 0..5,
                cols: 39..45,
                value: -0.7,
            }],
        }
    }

    /// Three-variable precision whose `(0, 1)` entry is `k01`; both variables
    /// load on the third.
    pub fn sign_design_precision(k01: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[1.0, k01, 0.4, k01, 1.0, 0.4, 0.4, 0.4, 1.0])
    }

    /// Heterogeneous independent mixing for the three-variable design.
    pub fn sign_design_scales() -> sign::RowScales {
        sign::RowScales::Independent(vec![
            MixingFamily::InverseGamma {
                shape: 2.0,
                scale: 2.0,
            },
            MixingFamily::Exponential { rate: 0.5 },
            MixingFamily::InverseGamma {
                shape: 3.0,
                scale: 3.0,
            },
        ])
    }

    /// A single inverse gamma (3, 3) variance shared by the whole row.
    pub fn shared_design_scales() -> sign::RowScales {
        sign::RowScales::Shared(MixingFamily::InverseGamma {
            shape: 3.0,
            scale: 3.0,
        })
    }

    /// Quantiles of the conditioning variable at which windows are centred,
    /// and their half width in probability.
    pub const SIGN_WINDOW_CENTERS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];
    pub const SIGN_WINDOW_HALF_WIDTH: f64 = 0.01;

    pub const MIXED_NUM_DISCRETE: usize = 9;
    pub const DESIGN_ROWS: usize = 100;
}
