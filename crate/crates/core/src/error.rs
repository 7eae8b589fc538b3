//! Error types shared across the crate.

/// Errors produced by model construction and the numerical engines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Model parameters violate a structural invariant.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNoConvergence { achieved: f64, requested: f64 },

    /// Root bracketing or iteration failed.
    #[error("root finding failed: {0}")]
    RootFind(String),

    /// Numerical Laplace inversion missed its precision target.
    #[error("laplace inversion residual {achieved:.3e} exceeds target {target:.3e}")]
    InversionAccuracy { achieved: f64, target: f64 },

    /// The input function is outside the class the operator supports.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// Extrapolation ladders disagree too much to report a value.
    #[error("unstable extrapolation: {0}")]
    Unstable(String),

    /// Not enough samples for the requested estimator.
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
}

pub type Result<T> = std::result::Result<T, Error>;
