use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("vacuum: {0}")]
    Vacuum(String),
    #[error("root finder did not converge in [{lo}, {hi}] (residual {residual:e})")]
    NoConvergence { lo: f64, hi: f64, residual: f64 },
    #[error("positivity lost at t = {t}: cell ({i}, {j}) has rho = {rho:e}")]
    Positivity { t: f64, i: usize, j: usize, rho: f64 },
    #[error("step size underflow at tau = {tau:e} (h = {h:e})")]
    StepUnderflow { tau: f64, h: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Usage/config errors map to exit code 2, everything else to 1.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
