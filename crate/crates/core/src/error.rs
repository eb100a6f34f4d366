use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The rate matrix does not have a unique stationary state.
    #[error("degenerate steady state: nullspace dimension {nullity} (smallest normalized singular values {singular_values:?})")]
    Degenerate {
        nullity: usize,
        singular_values: Vec<f64>,
    },

    /// A linear-algebra or propagation step lost the required accuracy.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    #[error(
        "quadrature did not converge: estimate {estimate:e} with error {error:e} \
         after {intervals} subintervals"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    /// Steady-state currents violate energy conservation.
    #[error("first law violated: sum of currents {sum:e} exceeds tolerance {tolerance:e}")]
    FirstLaw { sum: f64, tolerance: f64 },

    /// The counting-field eigenvalue branch could not be tracked.
    #[error("eigenvalue branch ambiguous: {0}")]
    Oracle(String),

    /// A relaxation threshold was not reached before the time limit.
    #[error("threshold {threshold:e} not reached by t = {t_max:e}; final relative entropy {final_entropy:e}")]
    Timeout {
        threshold: f64,
        t_max: f64,
        final_entropy: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
