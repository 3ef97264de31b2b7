#![allow(dead_code)]

//! Numerical oracles shared by the integration tests.

use nalgebra::DMatrix;

/// `∫_0^∞ f(x) dx` by the trapezoid rule in `t = ln x`.
pub fn integrate_positive(f: impl Fn(f64) -> f64) -> f64 {
    let (lo, hi, h) = (-45.0, 45.0, 0.005);
    let steps = ((hi - lo) / h) as usize;
    let mut s = 0.0;
    for k in 0..=steps {
        let t = lo + k as f64 * h;
        let x = t.exp();
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        let v = f(x) * x;
        if v.is_finite() {
            s += w * v;
        }
    }
    s * h
}

/// `∫_ℝ f(y) dy` by the trapezoid rule in `y = sinh(t)`.
pub fn integrate_real(f: impl Fn(f64) -> f64) -> f64 {
    let (lo, hi, h) = (-12.0, 12.0, 0.002);
    let steps = ((hi - lo) / h) as usize;
    let mut s = 0.0;
    for k in 0..=steps {
        let t: f64 = lo + k as f64 * h;
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        let v = f(t.sinh()) * t.cosh();
        if v.is_finite() {
            s += w * v;
        }
    }
    s * h
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Mean and batch-means standard error of an autocorrelated series.
pub fn batch_mean_se(xs: &[f64], batches: usize) -> (f64, f64) {
    let len = xs.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| xs[b * len..(b + 1) * len].iter().sum::<f64>() / len as f64)
        .collect();
    mean_se(&means)
}

/// Sample variance and its standard error, `√((m4 − s⁴)/n)`.
pub fn variance_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    (m2 * n / (n - 1.0), ((m4 - m2 * m2) / n).sqrt())
}

/// Two-sided Kolmogorov-Smirnov p-value for `n` samples against `cdf`.
pub fn ks_p_value(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = 2.0 * (-2.0 * kf * kf * lambda * lambda).exp();
        p += if k % 2 == 1 { term } else { -term };
    }
    p.clamp(0.0, 1.0)
}

/// Direct matrix-t log density of `n × p` data under `HIW(b, ρI)` on the
/// complete graph, written as the chain of multivariate-t predictives.
pub fn matrix_t_sequential(y: &DMatrix<f64>, b: f64, rho: f64) -> f64 {
    let (n, p) = y.shape();
    let pf = p as f64;
    let mut scale = DMatrix::<f64>::identity(p, p) * rho;
    let mut total = 0.0;
    for i in 0..n {
        let nu = b + i as f64;
        let row = y.row(i).transpose();
        let s = &scale / nu;
        let chol = s.clone().cholesky().unwrap();
        let log_det = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let quad = (row.transpose() * chol.inverse() * &row)[(0, 0)];
        total += statrs::function::gamma::ln_gamma((nu + pf) / 2.0)
            - statrs::function::gamma::ln_gamma(nu / 2.0)
            - 0.5 * pf * (nu * std::f64::consts::PI).ln()
            - 0.5 * log_det
            - 0.5 * (nu + pf) * (1.0 + quad / nu).ln();
        scale += &row * row.transpose();
    }
    total
}

/// Modified Bessel function of the second kind from
/// `K_ν(x) = ∫_0^∞ exp(−x cosh t) cosh(νt) dt`.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    let h = 1e-3;
    let mut s = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let v = (-x * t.cosh() + nu * t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
        s += v;
        if v < 1e-300 || t > 50.0 {
            break;
        }
        t += h;
    }
    s * h
}

/// Cliques and separators of a graph on three vertices.
pub fn three_vertex_factors(edges: u8) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
    let present: Vec<(usize, usize)> =
        (0..3).filter(|k| edges & (1 << k) != 0).map(|k| PAIRS[k]).collect();
    match present.len() {
        0 => (vec![vec![0], vec![1], vec![2]], vec![]),
        1 => {
            let (a, b) = present[0];
            (vec![vec![a, b], vec![3 - a - b]], vec![])
        }
        2 => {
            let hub = (0..3)
                .find(|v| present.iter().all(|&(a, b)| a == *v || b == *v))
                .unwrap();
            let cliques = present.iter().map(|&(a, b)| vec![a, b]).collect();
            (cliques, vec![vec![hub]])
        }
        _ => (vec![vec![0, 1, 2]], vec![]),
    }
}

pub fn columns(y: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(y.nrows(), idx.len(), |i, j| y[(i, idx[j])])
}
