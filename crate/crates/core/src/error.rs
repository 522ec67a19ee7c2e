use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("ring basis of size {size} exceeds the cap {cap}")]
    BasisTooLarge { size: u128, cap: u64 },
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a unit: {0}")]
    NotUnit(String),
    #[error("unsupported ring kind for {op}: {kind}")]
    UnsupportedKind { op: &'static str, kind: String },
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("operator does not commute: {0}")]
    NonCommuting(String),
    #[error("inhomogeneous input: {0}")]
    Inhomogeneous(String),
    #[error("degree bound too small: {0}")]
    BoundTooSmall(String),
    #[error("Hilbert polynomial has not stabilized by degree {0}")]
    Unstabilized(i64),
    #[error("zero submodule")]
    ZeroSubmodule,
    #[error("empty prime list")]
    EmptyPrimes,
    #[error("degree window violated: {0}")]
    DegreeWindow(String),
    #[error("level order violated: {0}")]
    LevelOrder(String),
    #[error("tower is missing level {0}")]
    MissingLevel(u32),
    #[error("psi is not an isomorphism at level {level}: {reason}")]
    PsiNotIso { level: u32, reason: String },
    #[error("pigeonhole exhausted at level {level}: {reason}")]
    PigeonholeExhausted { level: u32, reason: String },
    #[error("link square fails to commute at level {level}: {reason}")]
    LinkSquare { level: u32, reason: String },
    #[error("missing declaration: {0}")]
    MissingDeclaration(String),
    #[error("schema violation at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("invariant failure in {name}: {msg}")]
    Invariant { name: String, msg: String },
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code for reports and exit handling.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "E_NOT_PRIME",
            Error::InvalidRing(_) => "E_INVALID_RING",
            Error::BasisTooLarge { .. } => "E_BASIS_CAP",
            Error::RingMismatch(_) => "E_RING_MISMATCH",
            Error::Dimension(_) => "E_DIMENSION",
            Error::NotUnit(_) => "E_NOT_UNIT",
            Error::UnsupportedKind { .. } => "E_UNSUPPORTED_KIND",
            Error::InvalidComplex(_) => "E_INVALID_COMPLEX",
            Error::NonCommuting(_) => "E_NON_COMMUTING",
            Error::Inhomogeneous(_) => "E_INHOMOGENEOUS",
            Error::BoundTooSmall(_) => "E_BOUND_TOO_SMALL",
            Error::Unstabilized(_) => "E_UNSTABILIZED",
            Error::ZeroSubmodule => "E_ZERO_SUBMODULE",
            Error::EmptyPrimes => "E_EMPTY_PRIMES",
            Error::DegreeWindow(_) => "E_DEGREE_WINDOW",
            Error::LevelOrder(_) => "E_LEVEL_ORDER",
            Error::MissingLevel(_) => "E_MISSING_LEVEL",
            Error::PsiNotIso { .. } => "E_PSI_NOT_ISO",
            Error::PigeonholeExhausted { .. } => "E_PIGEONHOLE",
            Error::LinkSquare { .. } => "E_LINK_SQUARE",
            Error::MissingDeclaration(_) => "E_MISSING_DECLARATION",
            Error::Schema { .. } => "E_SCHEMA",
            Error::Invariant { .. } => "E_INVARIANT",
            Error::Parity(_) => "E_PARITY",
            Error::UnknownName(_) => "E_UNKNOWN_NAME",
            Error::Io(_) => "E_IO",
        }
    }
}
