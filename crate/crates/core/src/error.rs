use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph is not decomposable")]
    NotDecomposable,

    #[error("no single-edge move preserves decomposability")]
    NoLegalMove,

    #[error("graphs do not differ by exactly one edge")]
    IllegalMovePair,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("density evaluated at non-positive input {0}")]
    NonPositiveInput(f64),

    #[error("scale matrix is not positive definite")]
    NonPdScale,

    #[error("block condition number {condition:.3e} exceeds 1e12")]
    IllConditioned { condition: f64 },

    #[error("scale d[{index}] = {value} is not positive and finite")]
    NonPositiveScale { index: usize, value: f64 },

    #[error("need at least {min} observations, got {n}")]
    TooFewSamples { n: usize, min: usize },

    #[error("no posterior samples to summarize")]
    EmptySampleSet,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not diagonally dominant at row {row}")]
    NotDiagonallyDominant { row: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("block overlaps the diagonal")]
    BlockOverlapsDiagonal,

    #[error("column {index} is constant")]
    ConstantColumn { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("cached log-marginal drifted: cached {cached}, recomputed {recomputed}")]
    CacheDrift { cached: f64, recomputed: f64 },

    #[error("at iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, iteration: usize) -> Error {
        match self {
            e @ Error::AtIteration { .. } => e,
            e => Error::AtIteration {
                iteration,
                source: Box::new(e),
            },
        }
    }
}
