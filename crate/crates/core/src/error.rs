use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("{what}: {required} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        required: u128,
        cap: u128,
    },

    #[error("generators {0} and {1} do not commute")]
    NotCommuting(usize, usize),

    #[error("dependent generator {0}")]
    DependentGenerator(usize),

    #[error("invalid logical operators: {0}")]
    InvalidLogicals(String),

    #[error("operator is not in the normalizer of the stabilizer")]
    NotInNormalizer,

    #[error("key exhausted: needed {needed} bits, {available} available")]
    KeyExhausted { needed: usize, available: usize },

    #[error("Kraus set is not complete: max deviation {0:.3e}")]
    Incomplete(f64),

    #[error("measurement outcome has zero probability")]
    ZeroProbability,

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line harness: 1 for usage errors,
    /// 2 for domain violations, 3 when an enumeration cap is exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parse(_) | Error::Io(_) => 1,
            Error::CapExceeded { .. } => 3,
            _ => 2,
        }
    }
}
