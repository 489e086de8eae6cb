use thiserror::Error;

/// Errors raised by the arithmetic kernel and everything built on it.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("q-integer [0] is not defined")]
    ZeroQInt,
    #[error("q-binomial ({n} choose {m}) requires m <= n")]
    BinomialRange { n: u64, m: u64 },
    #[error("{value} is not p-integral for p = {p} (excluded prime)")]
    Integrality { p: u64, value: String },
    #[error("element is not invertible in Z_({p})[q]/([{p}]^{n})")]
    NotInvertible { p: u64, n: u32 },
    #[error("closed-form inverse of [{m}] needs 1 <= m < p = {p}")]
    QIntOutOfRange { m: u64, p: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("ring mismatch: (p, n) = ({0}, {1}) vs ({2}, {3})")]
    RingMismatch(u64, u32, u64, u32),
    #[error("n must be at least 1")]
    ZeroPower,
    #[error("operation needs a nonempty index")]
    EmptyIndex,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{0} out of range")]
    OutOfRange(String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precision underflow: {0}")]
    Precision(String),
    #[error("no admissible prime left in the prime set")]
    EmptyPrimeSet,
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
