use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sample set")]
    EmptySamples,
    #[error("non-finite sample value")]
    NonFinite,
    #[error("sample {x} lies outside the domain [{a}, {b}]")]
    OutsideDomain { x: f64, a: f64, b: f64 },
    #[error("interval [{0}, {1}] has zero length")]
    ZeroLength(f64, f64),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("empty sequence")]
    EmptySequence,
    #[error("sequence of length {0} is too long for exhaustive search")]
    TooLong(usize),
    #[error("interval has no empirical mass")]
    ZeroMass,
    #[error("cutting-plane solver exceeded its iteration cap of {0}")]
    IterationCap(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("quadrature did not converge on [{0}, {1}]")]
    Quadrature(f64, f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
