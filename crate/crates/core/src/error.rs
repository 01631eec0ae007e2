use thiserror::Error;

/// Errors shared by the solvers and numeric oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("solver did not converge after {iterations} iterations (residual gap {gap:.3e})")]
    NonConvergence {
        iterations: usize,
        /// Best certified duality gap (or fixed-point residual) reached.
        gap: f64,
        /// Best iterate reached, flattened; empty when not meaningful.
        best: Vec<f64>,
    },

    #[error("problem infeasible: {0}")]
    Infeasible(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("grid guard exceeded: {points} points requested, limit {limit}")]
    GridGuard { points: u128, limit: u128 },

    #[error("inconclusive result: {0}")]
    Inconclusive(String),
}

pub type Result<V> = std::result::Result<V, Error>;
