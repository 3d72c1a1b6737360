use thiserror::Error;

/// Errors produced by the geometry, body, holonomy and integrator modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SwimError {
    #[error("point ({x}, {y}) lies outside the chart domain |z|^2 < {limit}")]
    OutsideChart { x: f64, y: f64, limit: f64 },

    #[error("metric parameter must be finite, got {0}")]
    BadMetricParameter(f64),

    #[error("index {index} out of range for {what}")]
    BadIndex { what: &'static str, index: usize },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("Killing Gram matrix is singular (rank {rank} of 3)")]
    SingularGram { rank: usize },

    #[error("deformation field violates the gauge condition (residual {residual:e}, limit {limit:e})")]
    GaugeViolation { residual: f64, limit: f64 },

    #[error("body is not balanced: |Q^j|/M = {first_moment:e}")]
    Unbalanced { first_moment: f64 },

    #[error("body is not in principal axes: Q^xy = {off_diagonal:e}")]
    NotPrincipal { off_diagonal: f64 },

    #[error("degenerate second moments: Q^{j}{j} + Q^{k}{k} = 0")]
    DegenerateMoments { j: usize, k: usize },

    #[error("balancing did not converge after {iterations} iterations (residual {residual:e})")]
    BalanceDidNotConverge { iterations: usize, residual: f64 },

    #[error("curvature tensor has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("stroke is not closed: |sigma(1) - sigma(0)| = {gap:e}")]
    NonClosedStroke { gap: f64 },

    #[error("invalid stroke: {0}")]
    InvalidStroke(String),

    #[error("finite-difference stencil leaves the chart domain at ({x}, {y})")]
    StencilOutsideChart { x: f64, y: f64 },
}

pub type Result<T> = std::result::Result<T, SwimError>;
