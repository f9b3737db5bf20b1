use thiserror::Error;

/// Errors raised across the crate. Variants map onto the failure modes each
/// operation documents.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polytope unbounded")]
    Unbounded,
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("polytope is lower-dimensional (affine dimension {found} < {ambient})")]
    Degenerate { found: usize, ambient: usize },
    #[error("point {0:?} is not a vertex")]
    NotAVertex(Vec<String>),
    #[error("enumeration exceeds the cap of {0} lattice points")]
    SizeCap(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("non-generic r = {0}")]
    NonGenericR(String),
    #[error("non-generic direction")]
    NonGenericDirection,
    #[error("divergent pairing: {0}")]
    DivergentPairing(String),
    #[error("infinite support: {0}")]
    InfiniteSupport(String),
    #[error("not quasi-polynomial of expected degree: residual at k = {k}")]
    NotQuasiPolynomial { k: i64 },
    #[error("vector list is not pointed")]
    NotPointed,
    #[error("vector list is not unimodular: {0}")]
    NotUnimodular(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("pole at evaluation point")]
    Pole,
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
