use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a supported prime")]
    InvalidPrime(u32),
    #[error("Sq^0 is not allowed in a word; the unit is the empty word")]
    ZeroExponent,
    #[error("operation needs p = 2, got p = {0}")]
    NeedsPrimeTwo(u32),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: i64, found: i64 },
    #[error("subalgebra {0} is infinite")]
    InfiniteSubalgebra(String),
    #[error("unsupported subalgebra: {0}")]
    UnsupportedSubalgebra(String),
    #[error("cannot parse {what}: {input}")]
    Parse { what: &'static str, input: String },
    #[error("degree {degree} exceeds the truncation bound {bound}")]
    BoundExceeded { degree: u32, bound: u32 },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("coaction not available in degree {0}")]
    CoactionUnavailable(u32),
    #[error("Dyer-Lashof value Q^{k}({generator}) is not known")]
    MissingDyerLashof { generator: String, k: u32 },
    #[error("Bockstein of {0} is not known")]
    MissingBockstein(String),
    #[error("Hochschild homology is not flat over the base: {0}")]
    NotFlat(String),
    #[error("unsupported generator kind for {0}")]
    UnsupportedKind(String),
    #[error("q^2 != 0 on the comodule")]
    NotADifferential,
    #[error("2r(n) + s(n) = 2^(n+2) - 1 fails at n = {0}")]
    ScheduleIdentity(u32),
    #[error("differential target {0} is already zero on this page")]
    DeadTarget(String),
    #[error("stage {stage} failed: {detail}")]
    Stage { stage: &'static str, detail: String },
    #[error("unknown catalog entry {0}")]
    UnknownSpectrum(String),
}
