//! Fixtures shared by the benchmarks: the reference continuous and mixed
//! simulation designs at their full size.

use nalgebra::DMatrix;
use scalemix::gsm::GsmConfig;
use scalemix::mixed::{MixedConfig, MixedData};
use scalemix::sim::designs::{self, ContinuousFit};
use scalemix::sim::{simulate_gsm_data, simulate_mixed_data};

/// 100 × 50 continuous design data.
pub fn continuous_data(seed: u64) -> DMatrix<f64> {
    let truth = designs::continuous_truth()
        .build(&mut scalemix::rng_from_seed(0))
        .expect("reference truth builds");
    simulate_gsm_data(designs::DESIGN_ROWS, &truth, &designs::continuous_generator_margins(), seed)
        .expect("reference design simulates")
        .data
}

pub fn continuous_config(seed: u64) -> GsmConfig {
    GsmConfig::new(designs::continuous_fit_margins(ContinuousFit::Gsm), 1_000_000, 0, seed)
        .expect("reference config is valid")
}

/// 100 × 50 mixed design data with 9 discrete columns.
pub fn mixed_data(seed: u64) -> MixedData {
    let truth = designs::mixed_truth()
        .build(&mut scalemix::rng_from_seed(0))
        .expect("reference truth builds");
    let sim = simulate_mixed_data(designs::DESIGN_ROWS, &truth, designs::MIXED_NUM_DISCRETE, 1, seed)
        .expect("reference design simulates");
    MixedData::new(sim.values, designs::MIXED_NUM_DISCRETE, 0.0).expect("rounded columns are integers")
}

pub fn mixed_config(seed: u64) -> MixedConfig {
    MixedConfig::new(1_000_000, 0, seed)
}
