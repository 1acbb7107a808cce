use crate::orchestrator::PartialRun;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("required sample size {value:e} does not fit in u64")]
    SampleSizeOverflow { value: f64 },

    #[error("{solver} did not converge after {iterations} iterations")]
    NoConvergence { solver: &'static str, iterations: usize },

    #[error("node budget of {budget} exhausted with {} candidates collected", partial.candidates.len())]
    BudgetExhausted { budget: usize, partial: Box<PartialRun> },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("malformed dataset file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Param(msg.into()))
}
