use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid triple: {0}")]
    InvalidTriple(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: u32, found: u32 },

    #[error("no certified decay bound for this measure")]
    NoDecayBound,

    #[error("frequency window {window} too small: tail bound {bound} exceeds scanned maximum {value}")]
    WindowTooSmall { window: f64, bound: f64, value: f64 },

    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureNonConvergence { a: f64, b: f64 },

    #[error("no closed form or extremizer known for {0}")]
    UnknownCase(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
