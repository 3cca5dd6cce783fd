use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("polynomial {0:?} is reducible over Z_p")]
    ReduciblePolynomial(Vec<u32>),
    #[error("polynomial must be monic of degree {expected}, got {got:?}")]
    WrongDegree { expected: usize, got: Vec<u32> },
    #[error("field order {p}^{n} is not supported (cap {cap})")]
    UnsupportedSize { p: u32, n: u32, cap: usize },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("element does not belong to this field")]
    MixedFields,
    #[error("linear system over Z_p is singular")]
    SingularSystem,
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("ordering strategy requires a basis")]
    MissingBasis,
    #[error("ordering strategy requires a primitive element")]
    MissingPrimitive,
    #[error("elements do not form a basis")]
    NotABasis,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("operation requires characteristic 2")]
    OddCharacteristic,
    #[error("shift function must vanish at zero")]
    ShiftAtZero,
    #[error("no cocycle value solves the basis equations")]
    NoSolution,
    #[error("squeeze parameter must be nonzero")]
    ZeroSqueeze,
    #[error("operands were built with different orderings")]
    MixedOrdering,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("kernel and line states come from different rotation sets")]
    ProvenanceMismatch,
    #[error("full enumeration refused for d = {0} (limit {1})")]
    TooLarge(usize, usize),
    #[error("tomogram is incomplete: {0}")]
    IncompleteTomogram(String),
    #[error("state is not physical: {0}")]
    NonPhysicalState(String),
    #[error("basis does not match the state's field")]
    BasisMismatch,
    #[error("Schmidt decomposition needs a pure state")]
    MixedStateUnsupported,
    #[error("energies must be non-decreasing")]
    NotSorted,
    #[error("expected {expected} energies, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("state has zero norm")]
    NormZero,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
