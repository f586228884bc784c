use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at offset {offset}: {message}")]
    Parse { message: String, offset: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate coordinate name `{0}`")]
    DuplicateCoordinate(String),
    #[error("monomial degree {degree} exceeds the configured bound {bound}")]
    ExponentBound { degree: u32, bound: u32 },
    #[error("coefficient size {bits} bits exceeds the configured bound {bound}")]
    CoefficientBound { bits: u64, bound: u64 },
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("bundle mismatch: {0}")]
    BundleMismatch(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
