use thiserror::Error;

/// Errors produced by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime in (2, 65536)")]
    NotPrime(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("evaluation point {0} appears more than once")]
    DuplicatePoint(u32),
    #[error("evaluation point must be nonzero")]
    ZeroPoint,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("element {value} is not reduced modulo {modulus}")]
    UnreducedElement { value: u32, modulus: u32 },

    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("length mismatch{}: expected {expected} symbols, got {actual}", level_suffix(*.level))]
    LengthMismatch {
        level: Option<usize>,
        expected: usize,
        actual: usize,
    },
    #[error("node {0} cannot act as its own helper")]
    SelfRepair(usize),
    #[error("expected {expected} distinct helpers, got {actual}")]
    WrongHelperCount { expected: usize, actual: usize },
    #[error("expected {expected} distinct shares, got {actual}")]
    WrongShareCount { expected: usize, actual: usize },
    #[error("file size {size} of level {level} is not a multiple of the per-stripe capacity {capacity}")]
    IndivisibleFileSize {
        level: usize,
        size: usize,
        capacity: usize,
    },
    #[error("level {0} carries no file in this system")]
    UnknownLevel(usize),
    #[error("system stores no data (all file sizes are zero)")]
    EmptySystem,
    #[error("node {0} is listed as both type I and type II")]
    OverlappingSets(usize),
    #[error("node id {node} out of range 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("split out of regime: l1 = {l1} > l2 = {l2}")]
    SplitOutOfRegime { l1: usize, l2: usize },
    #[error("bad range: {0}")]
    BadRange(String),
    #[error("invalid rates: {0}")]
    InvalidRates(String),

    #[error("entropy checks require n = d + 1 (got n = {n}, d = {d})")]
    NotSquareSystem { n: usize, d: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("share file: {0}")]
    ShareFormat(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

fn level_suffix(level: Option<usize>) -> String {
    match level {
        Some(j) => format!(" at level {j}"),
        None => String::new(),
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
