use thiserror::Error;

/// Errors raised by the smile, pricing and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SabrError {
    /// An input lies outside the domain of the formula or model.
    #[error("domain error: {0}")]
    Domain(String),

    /// The composite implied volatility `i0 * (1 + i1 * tau)` is not positive.
    #[error("degenerate smile point at strike {strike}: composite vol {vol} is not positive")]
    DegenerateVol { strike: f64, vol: f64 },

    /// A price lies outside the no-arbitrage band of the option.
    #[error("price {price} outside the no-arbitrage band ({lower}, {upper})")]
    OutOfBand { price: f64, lower: f64, upper: f64 },

    /// An iterative solver did not converge.
    #[error("{what} did not converge after {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },

    /// A non-finite value appeared in a computation that must stay finite.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, SabrError>;

pub(crate) fn domain(msg: impl Into<String>) -> SabrError {
    SabrError::Domain(msg.into())
}
