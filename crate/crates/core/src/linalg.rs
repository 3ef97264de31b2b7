//! Dense linear-algebra helpers shared by the samplers.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result};

/// Largest condition number accepted for blocks entering a log-determinant.
pub const MAX_CONDITION: f64 = 1e12;

/// In-place lower Cholesky factor of a row-major `p × p` SPD matrix.
/// Only the lower triangle is read and written. Returns `false` if a pivot
/// is not strictly positive.
pub fn cholesky_in_place(a: &mut [f64], p: usize) -> bool {
    for j in 0..p {
        let mut d = a[j * p + j];
        for k in 0..j {
            d -= a[j * p + k] * a[j * p + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * p + j] = d;
        for i in (j + 1)..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= a[i * p + k] * a[j * p + k];
            }
            a[i * p + j] = s / d;
        }
    }
    true
}

/// Log-determinant of a row-major SPD matrix, destroying its lower triangle.
pub fn log_det_in_place(a: &mut [f64], p: usize) -> Option<f64> {
    if !cholesky_in_place(a, p) {
        return None;
    }
    Some(2.0 * (0..p).map(|i| a[i * p + i].ln()).sum::<f64>())
}

/// Extracts the principal submatrix indexed by `idx`.
pub fn principal_submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Extracts the submatrix with rows `rows` and columns `cols`.
pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = a;
            m[(j, i)] = a;
        }
    }
}

pub fn spd_log_det(m: &DMatrix<f64>) -> Result<f64> {
    let chol = m.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut inv = m
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?
        .inverse();
    symmetrize(&mut inv);
    Ok(inv)
}

pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(m).first().copied().unwrap_or(f64::INFINITY)
}

pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    m.is_square() && m.clone().cholesky().is_some()
}

/// Checks an SPD matrix known to have all eigenvalues ≥ `floor` against the
/// condition-number limit. The trace bounds the largest eigenvalue, so the
/// eigen-decomposition is only computed when that bound is inconclusive.
pub fn check_condition(m: &DMatrix<f64>, floor: f64) -> Result<()> {
    let trace = m.trace();
    if trace / floor <= MAX_CONDITION {
        return Ok(());
    }
    let eig = symmetric_eigenvalues(m);
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        Err(Error::IllConditioned { condition })
    } else {
        Ok(())
    }
}
