use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("rational function evaluated at a pole (r = {0})")]
    EvalAtPole(String),

    #[error("root refinement stalled: {0}")]
    NoConvergence(String),

    #[error("AIM did not converge within {n_max} iterations (last roots {last:?})")]
    AimNoConvergence { n_max: usize, last: Vec<String> },

    #[error("working precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("no sign change of the shooting function in [{lo}, {hi}]")]
    NoBracket { lo: String, hi: String },

    #[error("no solution found: {0}")]
    NoSolutionFound(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
