//! Monte Carlo checks of conditional sign independence and conditional
//! uncorrelatedness for scale mixtures drawn row by row.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::sample_gaussian_rows;
use crate::dist::MixingFamily;
use crate::{Error, Result};

/// How the per-row variances are drawn.
#[derive(Clone, Debug, PartialEq)]
pub enum RowScales {
    /// An independent `d_i` per coordinate.
    Independent(Vec<MixingFamily>),
    /// One `τ` shared by all coordinates of a row.
    Shared(MixingFamily),
}

/// Draws `n` rows `y = (√d_1 z_1, …, √d_q z_q)` with `z ~ N(0, precision⁻¹)`
/// and fresh scales for every row.
pub fn simulate_scale_mixture_rows(
    n: usize,
    precision: &DMatrix<f64>,
    scales: &RowScales,
    seed: u64,
) -> Result<DMatrix<f64>> {
    let q = precision.nrows();
    if let RowScales::Independent(f) = scales {
        if f.len() != q {
            return Err(Error::DimensionMismatch(format!(
                "{} mixing laws for {q} variables",
                f.len()
            )));
        }
    }
    let mut rng = crate::rng_from_seed(seed);
    let mut rows = sample_gaussian_rows(n, precision, &mut rng)?;
    for mut row in rows.row_iter_mut() {
        match scales {
            RowScales::Independent(f) => {
                for (x, m) in row.iter_mut().zip(f) {
                    *x *= m.sample(&mut rng)?.sqrt();
                }
            }
            RowScales::Shared(m) => {
                let s = m.sample(&mut rng)?.sqrt();
                row.iter_mut().for_each(|x| *x *= s);
            }
        }
    }
    Ok(rows)
}

/// Which conditional functional of the target is compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `P(Y_target < 0 | ·)`.
    NegativeProbability,
    /// `E[Y_target | ·]`.
    Mean,
}

/// One cell of the grid: conditioning on the window of `Y_given` alone
/// versus additionally on a bin of `Y_other`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellComparison {
    pub window: usize,
    pub bin: usize,
    pub n_window: usize,
    pub n_cell: usize,
    /// Estimate given the window only.
    pub window_value: f64,
    /// Estimate given the window and the bin.
    pub cell_value: f64,
    /// Standard error of `cell_value − window_value`.
    pub se: f64,
}

impl CellComparison {
    pub fn z(&self) -> f64 {
        (self.cell_value - self.window_value) / self.se
    }
}

/// Windows on `Y_given` and bins on `Y_other`, as half-open intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct BinGrid {
    pub windows: Vec<(f64, f64)>,
    pub bins: Vec<(f64, f64)>,
}

fn sorted_column(rows: &DMatrix<f64>, j: usize) -> Vec<f64> {
    let mut c: Vec<f64> = rows.column(j).iter().copied().collect();
    c.sort_by(f64::total_cmp);
    c
}

fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let i = ((sorted.len() - 1) as f64 * p).round() as usize;
    sorted[i]
}

impl BinGrid {
    /// Narrow windows of `Y_given` around the empirical quantiles `centers`
    /// (each covering `±half_width` in probability) and equal-count bins of
    /// `Y_other`.
    pub fn from_quantiles(
        rows: &DMatrix<f64>,
        given: usize,
        other: usize,
        centers: &[f64],
        half_width: f64,
        num_bins: usize,
    ) -> Result<Self> {
        if rows.nrows() < 2 || num_bins == 0 {
            return Err(Error::InvalidParams("need rows and at least one bin".into()));
        }
        let g = sorted_column(rows, given);
        let windows = centers
            .iter()
            .map(|&c| {
                if !(c - half_width >= 0.0 && c + half_width <= 1.0) {
                    return Err(Error::InvalidParams(format!(
                        "window around quantile {c} leaves [0, 1]"
                    )));
                }
                Ok((
                    empirical_quantile(&g, c - half_width),
                    empirical_quantile(&g, c + half_width),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let o = sorted_column(rows, other);
        let edges: Vec<f64> = (0..=num_bins)
            .map(|k| match k {
                0 => f64::NEG_INFINITY,
                k if k == num_bins => f64::INFINITY,
                k => empirical_quantile(&o, k as f64 / num_bins as f64),
            })
            .collect();
        let bins = edges.windows(2).map(|w| (w[0], w[1])).collect();
        Ok(BinGrid { windows, bins })
    }
}

fn in_interval(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo && x < hi
}

/// Compares the functional of `Y_target` given each window of `Y_given`
/// with the same functional given the window and each bin of `Y_other`.
///
/// The standard error is that of a two-sample difference between the cell
/// and the rest of its window, scaled by the share of the window outside
/// the cell.
pub fn compare_conditionals(
    rows: &DMatrix<f64>,
    target: usize,
    other: usize,
    given: usize,
    grid: &BinGrid,
    functional: Functional,
) -> Result<Vec<CellComparison>> {
    let q = rows.ncols();
    if target >= q || other >= q || given >= q {
        return Err(Error::DimensionMismatch(format!("column index out of range for {q} columns")));
    }
    let value = |y: f64| match functional {
        Functional::NegativeProbability => f64::from(u8::from(y < 0.0)),
        Functional::Mean => y,
    };
    let mut out = Vec::with_capacity(grid.windows.len() * grid.bins.len());
    for (wi, &w) in grid.windows.iter().enumerate() {
        // (count, sum, sum of squares) per bin
        let mut stats = vec![(0usize, 0.0f64, 0.0f64); grid.bins.len()];
        for r in 0..rows.nrows() {
            if !in_interval(rows[(r, given)], w) {
                continue;
            }
            if let Some(b) = grid.bins.iter().position(|&b| in_interval(rows[(r, other)], b)) {
                let v = value(rows[(r, target)]);
                let s = &mut stats[b];
                s.0 += 1;
                s.1 += v;
                s.2 += v * v;
            }
        }
        let n_window: usize = stats.iter().map(|s| s.0).sum();
        let sum_window: f64 = stats.iter().map(|s| s.1).sum();
        let sq_window: f64 = stats.iter().map(|s| s.2).sum();
        for (bi, &(n_cell, sum, sq)) in stats.iter().enumerate() {
            let n_rest = n_window - n_cell;
            if n_cell < 2 || n_rest < 2 {
                return Err(Error::TooFewSamples { n: n_cell.min(n_rest), min: 2 });
            }
            let var = |n: usize, s: f64, s2: f64| (s2 - s * s / n as f64) / (n - 1) as f64;
            let var_cell = var(n_cell, sum, sq);
            let var_rest = var(n_rest, sum_window - sum, sq_window - sq);
            let share_rest = n_rest as f64 / n_window as f64;
            let se = share_rest * (var_cell / n_cell as f64 + var_rest / n_rest as f64).sqrt();
            out.push(CellComparison {
                window: wi,
                bin: bi,
                n_window,
                n_cell,
                window_value: sum_window / n_window as f64,
                cell_value: sum / n_cell as f64,
                se,
            });
        }
    }
    Ok(out)
}
