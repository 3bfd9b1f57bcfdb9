use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("symmetric-node construction failed for pair ({i}, {j}): ray meets no macroelement edge")]
    Stencil { i: usize, j: usize },

    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },

    #[error("domain error: {what} evaluated at {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("electroneutrality violated: (p - n, 1)_h = {imbalance:e} exceeds {tolerance:e}")]
    Electroneutrality { imbalance: f64, tolerance: f64 },

    #[error("linear solve did not converge: relative residual {residual:e}")]
    LinearSolve { residual: f64 },

    #[error("Picard iteration did not converge after {iterations} iterations (residual {residual:e})")]
    PicardDiverged { iterations: usize, residual: f64 },

    #[error("line search found no residual decrease at iteration {iteration} (residual {residual:e})")]
    LineSearch { iteration: usize, residual: f64 },

    #[error("step {step} at t = {t}: {source}")]
    Step {
        step: usize,
        t: f64,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
