use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of supported range: {0}")]
    Range(String),

    #[error("series did not converge within {terms} terms (residual {residual:e})")]
    Convergence { terms: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("channel N={n} is below threshold N0={n0}")]
    BelowThreshold { n: i64, n0: i64 },

    #[error("threshold photon number {n0} exceeds the channel cap {cap}")]
    ChannelExplosion { n0: i64, cap: i64 },

    #[error("degenerate saddle: N_m={n_m} lies below threshold N0={n0}")]
    DegenerateSaddle { n_m: f64, n0: i64 },

    #[error("asymptotic formula not applicable: {0}")]
    AsymptoticsInvalid(String),

    #[error("channel N={n}, theta={theta}: {source}")]
    InChannel { n: i64, theta: f64, source: Box<Error> },

    #[error("intermediate regime (y_m={y_m}); no closed form applies without forcing a branch")]
    IntermediateRegime { y_m: f64 },
}
