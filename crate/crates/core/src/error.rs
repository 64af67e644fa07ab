use alloc::string::String;

/// Errors raised while building or running a scheme.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PirError {
    /// Malformed input: mismatched moduli, lengths or out-of-range indices.
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("division by zero in F_{modulus}")]
    DivisionByZero { modulus: u32 },

    /// A supplied object violates one of its structural properties.
    #[error("validation error: {property}")]
    Validation { property: String },

    /// The parameters admit no construction (field too small, characteristic
    /// collides with a coefficient, divisibility fails).
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),

    /// The geometrical construction's ratio condition fails. Indices are 1-based server numbers.
    #[error("construction unsupported: ratio condition fails at i={i}, j={j}, l={l}")]
    ConstructionUnsupported { i: usize, j: usize, l: usize },

    /// No decoding equation exists for a mixed query at this (1-based) server.
    #[error("no decoding equation for a mixed query at server {server}")]
    NotDecodable { server: usize },

    #[error("scheme cannot be rotated by offset {offset}: {reason}")]
    NotRotatable { offset: usize, reason: String },

    #[error("scheme cannot be lifted: {0}")]
    NotLiftable(String),

    /// Rejection sampling ran out of attempts.
    #[error("{what}: gave up after {attempts} attempts")]
    RetryExhausted { what: String, attempts: usize },

    /// A derived quantity disagreed with its closed form, or an internal invariant broke.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T, E = PirError> = core::result::Result<T, E>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(PirError::Parameter(msg.into()))
}
