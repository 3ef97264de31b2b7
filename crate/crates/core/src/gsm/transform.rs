use nalgebra::DMatrix;

use super::MarginSpec;
use crate::{Error, Result};

/// Maps data to the Gaussian scale: column `i` becomes
/// `(y_i − α_i − β_i d_i) / √d_i`.
pub fn transform(data: &DMatrix<f64>, scales: &[f64], margins: &[MarginSpec]) -> Result<DMatrix<f64>> {
    let q = data.ncols();
    if scales.len() != q || margins.len() != q {
        return Err(Error::DimensionMismatch(format!(
            "data has {q} columns, {} scales, {} margins",
            scales.len(),
            margins.len()
        )));
    }
    check_scales(scales)?;
    let mut out = data.clone();
    for (i, (m, &d)) in margins.iter().zip(scales).enumerate() {
        if m.mixing.is_degenerate() && m.skew_alpha == 0.0 && m.skew_beta == 0.0 && d == 1.0 {
            continue;
        }
        let (mu, s) = (m.location(d), d.sqrt());
        out.column_mut(i).apply(|y| *y = (*y - mu) / s);
    }
    Ok(out)
}

/// Inverse of [`transform`]: `y_i = √d_i z_i + α_i + β_i d_i`.
pub fn untransform(z: &DMatrix<f64>, scales: &[f64], margins: &[MarginSpec]) -> Result<DMatrix<f64>> {
    check_scales(scales)?;
    let mut out = z.clone();
    for (i, (m, &d)) in margins.iter().zip(scales).enumerate() {
        let (mu, s) = (m.location(d), d.sqrt());
        out.column_mut(i).apply(|y| *y = *y * s + mu);
    }
    Ok(out)
}

pub(crate) fn check_scales(scales: &[f64]) -> Result<()> {
    for (index, &value) in scales.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveScale { index, value });
        }
    }
    Ok(())
}

/// Raw sufficient statistics for the transformed cross-product.
///
/// With `m_i = α_i + β_i d_i`, raw cross-product `G` and column sums `s`,
/// `T_ij = (G_ij − m_i s_j − m_j s_i + n m_i m_j) / √(d_i d_j)`.
#[derive(Clone, Debug)]
pub(crate) struct RawStats {
    pub n: usize,
    pub gram: DMatrix<f64>,
    pub sums: Vec<f64>,
}

impl RawStats {
    pub fn new(data: &DMatrix<f64>) -> Self {
        RawStats {
            n: data.nrows(),
            gram: data.transpose() * data,
            sums: data.column_iter().map(|c| c.sum()).collect(),
        }
    }

    #[inline]
    pub fn transformed_entry(&self, i: usize, j: usize, loc: &[f64], scales: &[f64]) -> f64 {
        let n = self.n as f64;
        (self.gram[(i, j)] - loc[i] * self.sums[j] - loc[j] * self.sums[i] + n * loc[i] * loc[j])
            / (scales[i] * scales[j]).sqrt()
    }

    pub fn transformed_gram(&self, loc: &[f64], scales: &[f64]) -> DMatrix<f64> {
        let q = scales.len();
        DMatrix::from_fn(q, q, |i, j| self.transformed_entry(i, j, loc, scales))
    }
}
