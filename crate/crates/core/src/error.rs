use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("probability underflow: {0:e} is below 1e-300")]
    Underflow(f64),

    #[error("derivative is singular at t = 0")]
    Singular,

    #[error("frequency domain error: pi/M = {lower} is not below epsilon = {epsilon}")]
    FrequencyDomain { lower: f64, epsilon: f64 },

    #[error("non-finite integrand value at t = {0}")]
    NonFinite(f64),

    #[error("adaptive quadrature exceeded {0} subdivisions (estimated error {1:e})")]
    MaxDepth(usize, f64),

    #[error("oscillatory block sum failed to converge: {0}")]
    Nonconvergence(String),

    #[error("tolerance budget violated: {0}")]
    BudgetViolation(String),

    #[error("decomposition mismatch: |I1+I2+I3 - I| = {mismatch:e} exceeds {allowed:e}")]
    DecompositionMismatch { mismatch: f64, allowed: f64 },

    #[error("Monte Carlo run refused: {0}")]
    CostGate(String),

    #[error("insufficient points: {0}")]
    InsufficientPoints(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
