use thiserror::Error;

/// Errors produced by the codec and simulation layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("extension degree {0} outside supported range 2..=12")]
    UnsupportedDegree(u32),
    #[error("polynomial {poly:#x} does not have degree {m}")]
    PolynomialDegree { poly: u32, m: u32 },
    #[error("polynomial {poly:#x} is not primitive: element 2 has order {order}")]
    NonPrimitivePolynomial { poly: u32, order: u32 },
    #[error("division by zero in GF(2^m)")]
    DivisionByZero,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("Reed-Solomon decoding failure")]
    DecodingFailure,
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed dump: {0}")]
    MalformedDump(String),
}

pub type Result<T> = std::result::Result<T, Error>;
