//! Error types shared across the solver.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid configuration: bad sizes, incompatible form/basis, out-of-range indices.
    #[error("configuration error: {0}")]
    Config(String),

    /// A closed-form denominator `w_j^2 - (k pi)^2` (or a Burgers pair variant)
    /// came within `EPS_SINGULAR` of zero. Training never sits exactly on a
    /// resonance, so this fails loudly instead of evaluating the removable limit.
    #[error("near-singular frequency: neuron {neuron}, test index {test_index}")]
    SingularFrequency { neuron: usize, test_index: usize },

    /// A non-finite value appeared during evaluation or gradient accumulation.
    #[error("non-finite value in {context}{}", match .index { Some(i) => format!(" (parameter {i})"), None => String::new() })]
    NonFinite {
        context: &'static str,
        index: Option<usize>,
    },

    /// Newton iteration for quadrature nodes failed to converge.
    #[error("quadrature root-finding did not converge (order {order}, node {node})")]
    RootFinding { order: usize, node: usize },

    /// Error metrics were requested for a problem without an exact solution.
    #[error("error metrics unavailable: problem has no exact solution")]
    MetricUnavailable,

    /// Every seed of a multi-seed run diverged.
    #[error("all seeds diverged")]
    AllSeedsDiverged,
}

pub type Result<T> = std::result::Result<T, Error>;
