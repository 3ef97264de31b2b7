mod common;

use common::mean_se;
use nalgebra::DMatrix;
use scalemix::dist::MixingFamily;
use scalemix::graph::is_decomposable;
use scalemix::gsm::{transform, MarginSpec};
use scalemix::sim::designs::{self, DESIGN_ROWS, MIXED_NUM_DISCRETE};
use scalemix::sim::{
    add_block, make_banded_precision, make_random_sparse_precision, sign_detection_table,
    sign_matrix, simulate_gsm_data, simulate_mixed_data, SignTable, TruthKind, TruthSpec,
};
use scalemix::{DecomposableGraph, Error};

fn class_counts(table: &SignTable) -> (usize, usize, usize) {
    (table.true_zero, table.true_pos, table.true_neg)
}

fn continuous_truth() -> DMatrix<f64> {
    designs::continuous_truth()
        .build(&mut scalemix::rng_from_seed(0))
        .unwrap()
}

fn mixed_truth() -> DMatrix<f64> {
    designs::mixed_truth().build(&mut scalemix::rng_from_seed(0)).unwrap()
}

#[test]
fn design_class_counts_are_exact() {
    let truth = continuous_truth();
    assert!((truth[(0, 1)] - 0.75).abs() < 1e-15 && (truth[(0, 2)] + 0.6).abs() < 1e-15);
    let perfect = sign_detection_table(&sign_matrix(&truth), &truth).unwrap();
    assert_eq!(class_counts(&perfect), (2256, 148, 96));
    assert_eq!(perfect.ratios(), [1.0, 1.0, 1.0]);
    assert_eq!(perfect.total(), 2500);

    let mixed = mixed_truth();
    let t = sign_detection_table(&sign_matrix(&mixed), &mixed).unwrap();
    assert_eq!(class_counts(&t), (2196, 148, 156));
    assert_eq!(mixed[(0, 39)], -0.7);
    assert_eq!(mixed[(44, 4)], -0.7);
    assert!(mixed.clone().cholesky().is_some());
}

#[test]
fn all_zero_estimate() {
    let truth = continuous_truth();
    let t = sign_detection_table(&DMatrix::zeros(50, 50), &truth).unwrap();
    assert_eq!(
        (t.est_zero, t.est_pos, t.est_neg),
        (2500, 0, 0),
    );
    assert_eq!(t.ratios()[1], 0.0);
}

#[test]
fn reference_table_row() {
    let truth = continuous_truth();
    let mut est = sign_matrix(&truth);
    // Drop three positive and seven negative symmetric pairs.
    for k in 0..3 {
        est[(k, k + 1)] = 0;
        est[(k + 1, k)] = 0;
    }
    for k in 10..17 {
        est[(k, k + 2)] = 0;
        est[(k + 2, k)] = 0;
    }
    let t = sign_detection_table(&est, &truth).unwrap();
    assert_eq!(
        (t.est_zero, t.true_zero, t.est_pos, t.true_pos, t.est_neg, t.true_neg),
        (2276, 2256, 142, 148, 82, 96)
    );
    let r = t.ratios();
    for (got, want) in r.iter().zip([1.009, 0.9595, 0.8542]) {
        assert!((got - want).abs() < 5e-4, "{got} vs {want}");
    }
    assert!(sign_detection_table(&DMatrix::zeros(3, 3), &truth).is_err());
}

#[test]
fn block_rules() {
    let base = make_banded_precision(50, 4.0, 0.2, -0.2).unwrap();
    let zero_block = add_block(&base, 0..5, 39..45, 0.0).unwrap();
    assert!(sign_matrix(&zero_block) == sign_matrix(&base));
    assert_eq!(add_block(&base, 0..5, 3..8, -0.1).unwrap_err(), Error::BlockOverlapsDiagonal);
    assert_eq!(make_banded_precision(3, 1.0, 0.0, 0.0).unwrap(), DMatrix::identity(3, 3));
}

#[test]
fn random_sparse_support_is_decomposable_and_dominant() {
    for seed in 0..20 {
        let spec = TruthSpec {
            kind: TruthKind::RandomSparse {
                pos_frac: 0.05,
                neg_frac: 0.05,
            },
            q: 30,
            extra_blocks: Vec::new(),
        };
        let m = spec.build(&mut scalemix::rng_from_seed(seed)).unwrap();
        let edges: Vec<(usize, usize)> = (0..30)
            .flat_map(|u| ((u + 1)..30).map(move |v| (u, v)))
            .filter(|&(u, v)| m[(u, v)] != 0.0)
            .collect();
        assert_eq!(edges.len(), 44);
        let g = DecomposableGraph::from_edges(30, &edges).unwrap();
        assert!(is_decomposable(g.adjacency()));
        for i in 0..30 {
            let off: f64 = (0..30).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            assert!(m[(i, i)] > off);
        }
        let again = make_random_sparse_precision(30, 0.05, 0.05, &mut scalemix::rng_from_seed(seed))
            .unwrap();
        assert_eq!(again, m);
    }
}

#[test]
fn gaussian_margins_reproduce_the_covariance() {
    let k = DMatrix::from_row_slice(3, 3, &[2.0, -0.6, 0.3, -0.6, 1.5, 0.4, 0.3, 0.4, 1.0]);
    let sigma = k.clone().try_inverse().unwrap();
    let sim = simulate_gsm_data(100_000, &k, &[MarginSpec::gaussian(); 3], 3).unwrap();
    assert_eq!(sim.scales, vec![1.0; 3]);
    assert_eq!(sim.data, sim.latent);
    let n = sim.data.nrows() as f64;
    let s = sim.data.transpose() * &sim.data / n;
    for i in 0..3 {
        for j in 0..3 {
            let tol = 0.05 * (sigma[(i, i)] * sigma[(j, j)]).sqrt();
            assert!((s[(i, j)] - sigma[(i, j)]).abs() < tol, "({i},{j}) {} vs {}", s[(i, j)], sigma[(i, j)]);
        }
    }
}

#[test]
fn exponential_mixing_has_laplace_kurtosis_across_replicates() {
    let k = DMatrix::identity(1, 1);
    let margins = [MarginSpec::new(MixingFamily::Exponential { rate: 1.0 })];
    let draws: Vec<f64> = (0..200_000u64)
        .map(|seed| simulate_gsm_data(1, &k, &margins, seed).unwrap().data[(0, 0)])
        .collect();
    let kurt: Vec<f64> = draws
        .chunks(20_000)
        .map(|c| {
            let n = c.len() as f64;
            let m2 = c.iter().map(|x| x * x).sum::<f64>() / n;
            let m4 = c.iter().map(|x| x.powi(4)).sum::<f64>() / n;
            m4 / (m2 * m2) - 3.0
        })
        .collect();
    let (mean, se) = mean_se(&kurt);
    assert!(mean > 0.0);
    assert!((mean - 3.0).abs() < 3.0 * se, "excess kurtosis {mean} ± {se}");
}

#[test]
fn transform_with_true_scales_recovers_latent() {
    let k = make_banded_precision(4, 2.0, 0.2, -0.1).unwrap();
    let mut margins = vec![
        MarginSpec::new(MixingFamily::Exponential { rate: 0.1 }),
        MarginSpec::new(MixingFamily::InverseGamma {
            shape: 3.0,
            scale: 10.0,
        }),
        MarginSpec::gaussian(),
        MarginSpec::new(MixingFamily::Gig {
            lambda: 0.5,
            chi: 1.0,
            psi: 2.0,
        }),
    ];
    margins[1].skew_alpha = 0.3;
    margins[1].skew_beta = -0.2;
    let sim = simulate_gsm_data(50, &k, &margins, 4).unwrap();
    let back = transform(&sim.data, &sim.scales, &margins).unwrap();
    assert!((back - &sim.latent).abs().max() < 1e-12);
    let again = simulate_gsm_data(50, &k, &margins, 4).unwrap();
    assert_eq!(again, sim);
}

#[test]
fn mixed_generator_rounds_discrete_columns() {
    let truth = mixed_truth();
    let sim = simulate_mixed_data(DESIGN_ROWS, &truth, MIXED_NUM_DISCRETE, 1, 5).unwrap();
    assert_eq!(sim.values.shape(), (100, 50));
    for j in 0..MIXED_NUM_DISCRETE {
        let col = sim.values.column(j);
        assert!(col.iter().all(|v| v.fract() == 0.0 && v.abs() <= 10.0));
        assert_eq!(col.map(|v| v.round()), col.clone_owned());
        assert_eq!(sim.precision[(j, j)], 1.0 / sim.omega[j]);
    }
    assert!(sim.values.column(MIXED_NUM_DISCRETE).iter().any(|v| v.fract() != 0.0));

    let pure = simulate_mixed_data(20, &truth, 0, 1, 6).unwrap();
    assert!(pure.omega.is_empty());
    assert_eq!(pure.precision, truth);
    assert!(simulate_mixed_data(20, &truth, 51, 1, 6).is_err());
}
