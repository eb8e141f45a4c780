use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no irreducible modulus of degree {1} over F_{0} (internal error)")]
    NoModulus(u64, u32),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("matrix is not square")]
    NonSquare,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("ring mismatch")]
    RingMismatch,
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("enumeration cap exceeded after {partial} elements")]
    CapExceeded { partial: usize },
    #[error("element is not semisimple")]
    NotSemisimple,
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("residue factorisation is not coprime")]
    NotCoprime,
    #[error("matrices do not commute")]
    NotCommuting,
    #[error("residue eigenvalues are not rational over the prime field")]
    EigenvaluesNotRational,
    #[error("residue of g is not semisimple")]
    ResidueNotSemisimple,
    #[error("splitting-element retry budget exhausted; raise the budget")]
    RandomnessExhausted,
    #[error("root subset budget exceeded: {0} roots")]
    SubsetBudgetExceeded(usize),
    #[error("residue condition violated: {0}")]
    ResidueCondition(String),
    #[error("invalid number field invariants: {0}")]
    InvalidInvariants(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
