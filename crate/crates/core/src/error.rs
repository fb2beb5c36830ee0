use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),
    #[error("double factorial is undefined for {0}")]
    DoubleFactorialDomain(i64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rank must be odd, got {0}")]
    EvenRank(usize),
    #[error("rank {0} is outside the supported range 3..=11")]
    UnsupportedRank(usize),
    #[error("a perfect matching needs an even number of positions, got {0}")]
    OddPositionCount(usize),
    #[error("invalid axis string {0:?}: expected letters x, y, z")]
    ParseAxis(String),
    #[error("index tuple has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matchings are defined over different position sets")]
    PositionSetMismatch,
    #[error("({q},{r},{s}) is not an odd partition of {n}")]
    InvalidPartition { n: usize, q: usize, r: usize, s: usize },
    #[error("argument {0} must be an odd positive integer")]
    NotOddPositive(i64),
    #[error("coefficient system for rank {rank} is {verdict}")]
    Unsolvable { rank: usize, verdict: &'static str },
    #[error("quadrature with {found} points is too small for rank {rank} (need at least {needed})")]
    UndersizedQuadrature { rank: usize, found: usize, needed: usize },
    #[error("Monte Carlo needs at least 100 samples, got {0}")]
    TooFewSamples(usize),
    #[error("monomial integral is not rational (odd power of sin(theta))")]
    IrrationalIntegral,
    #[error("tensor format: {0}")]
    TensorFormat(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
