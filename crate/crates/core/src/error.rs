use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("negative edge multiplicity at ({i}, {j})")]
    NegativeMultiplicity { i: usize, j: usize },
    #[error("{what} needs at least {min} vertices, got {n}")]
    TooSmall { what: &'static str, min: usize, n: usize },
    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("expected length {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("entry {index} must be a positive integer")]
    NotPositive { index: usize },
    #[error("r at vertex {vertex} does not divide its neighbour sum")]
    NotDivisible { vertex: usize },
    #[error("gcd of r is not 1")]
    GcdNotOne,
    #[error("not an arithmetical structure on this graph")]
    InvalidStructure,
    #[error("reduction needs at least 3 vertices, got {n}")]
    TooFewVertices { n: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("unit fraction term {index} does not exceed m")]
    DegenerateRep { index: usize },
    #[error("integer too large: {0}")]
    TooLarge(String),
    #[error("outside the domain of the formula: {0}")]
    Domain(String),
    #[error("fixed-width integer overflow")]
    Overflow,
    #[error("work budget of {0} steps exhausted")]
    BudgetExceeded(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
