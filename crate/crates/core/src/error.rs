use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid offspring law: {0}")]
    InvalidDistribution(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A moment or constant needs a moment of `Z` that is infinite.
    #[error("divergent moment: {0}")]
    Divergent(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// The streaming evaluator exceeded its per-sample node budget.
    #[error("node budget of {budget} exceeded at depth {depth} (sample {sample})")]
    NodeBudget { budget: u64, depth: usize, sample: u64 },

    /// Explicit trees and exhaustive enumeration have hard size caps.
    #[error("size cap exceeded: {what} has {size}, cap is {cap}")]
    CapExceeded { what: &'static str, size: u64, cap: u64 },

    /// The predicted recursion scale would underflow double precision.
    #[error("predicted scale (mR)^n = {scale:e} below 1e-200; shorten the depth")]
    ScaleUnderflow { scale: f64 },

    #[error("no sandwich constants found: {0}")]
    NoSandwich(String),

    #[error("flow optimizer did not converge after {iterations} iterations (gap {gap:e}, gradient norm {grad_norm:e})")]
    NonConvergence {
        iterations: usize,
        gap: f64,
        grad_norm: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
