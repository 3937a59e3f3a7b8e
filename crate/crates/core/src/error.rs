use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds 63 bits")]
    ModulusTooLarge(u64),
    #[error("no prime found in ({lo}, {hi}) after {draws} draws")]
    PrimeSearchExhausted { lo: u64, hi: u64, draws: u64 },
    #[error("duplicate interpolation node {0}")]
    DuplicateNode(u64),
    #[error("decode failure: {0}")]
    DecodeFailure(&'static str),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("instance size {0} is odd")]
    OddSize(usize),
    #[error("disjoint union over heterogeneous inputs")]
    Heterogeneous,
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("transport error: {0}")]
    Transport(String),
}

pub type Result<T> = std::result::Result<T, Error>;
