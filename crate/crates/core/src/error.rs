use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("outside supported range: {0}")]
    Range(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("enumeration budget exceeded: {0}")]
    Overflow(String),
    #[error("cannot certify merged spectrum: {0}")]
    Certification(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("degenerate triangle {index} (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("factorization failed at column {0}: matrix not positive definite")]
    Factorization(usize),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("config: {0}")]
    Config(String),
    #[error("mesh parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
