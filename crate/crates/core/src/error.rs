use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not in su(2): residual {residual:e} exceeds tolerance {tol:e}")]
    NotSu2 { residual: f64, tol: f64 },

    #[error("factor modulus {modulus} must be strictly below 1")]
    ModulusOutOfRange { modulus: f64 },

    #[error("non-finite factor parameter")]
    NonFiniteParameter,

    #[error("spectral parameter must be nonzero")]
    ZeroSpectralParameter,

    #[error("normalizer argument {re}{im:+}i is outside the open right half-plane")]
    NormalizerBranch { re: f64, im: f64 },

    #[error("spectral parameter must be a positive real, got {0}")]
    NonPositiveLambda(f64),

    #[error("invalid potentials: {0}")]
    InvalidPotentials(String),

    #[error("index {index} lies outside the {axis} window of length {len}")]
    OutsideWindow {
        axis: &'static str,
        index: usize,
        len: usize,
    },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("Hirota update requires |pq/4| < 1, got {0}")]
    HirotaCoupling(f64),

    #[error("lattice frame is path dependent at ({n}, {m}): deviation {deviation:e}")]
    PathDependence { n: usize, m: usize, deviation: f64 },

    #[error(
        "transition at ({n}, {m}) does not fit the {template} template: residual {residual:e}"
    )]
    TransitionFit {
        n: usize,
        m: usize,
        template: &'static str,
        residual: f64,
    },

    #[error("transition at ({n}, {m}) has a vanishing off-diagonal coupling")]
    DegenerateTransition { n: usize, m: usize },

    #[error("need at least {needed} distinct spectral samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}
