use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("zero polynomial has every x as root")]
    ZeroPolynomial,

    #[error("residue {index} is not below p^{precision}")]
    ResidueOutOfRange { index: usize, precision: u32 },

    #[error("precision {precision} is too low for Henselian level {level} (need at least {needed})")]
    PrecisionTooLow { precision: u32, level: u32, needed: u32 },

    #[error("degenerate input, raise precision (digit search exceeded {cap} nodes)")]
    NodeCapExceeded { cap: usize },

    #[error("root descent exceeded its discriminant depth budget of {budget}")]
    DepthBudgetExceeded { budget: u64 },

    #[error("stability check failed for d = {d}: {detail}")]
    StabilityViolation { d: usize, detail: String },

    #[error("value ({n}, {d}) is outside the computed table (n <= {n_max}, d <= {d_max})")]
    OutOfTable { n: usize, d: usize, n_max: usize, d_max: usize },

    #[error("entropy argument {0} lies outside [0, 1)")]
    EntropyDomain(f64),

    #[error("main distributional assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numeric overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
