use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain size mismatch: {left} vs {right}")]
    DomainMismatch { left: usize, right: usize },
    #[error("point {point} out of range for domain of size {n}")]
    PointOutOfRange { point: usize, n: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("images do not form a bijection")]
    NotBijection,
    #[error("group is not transitive")]
    NotTransitive,
    #[error("partition or set is not invariant under the group")]
    NotInvariant,
    #[error("generator images do not define a homomorphism")]
    NotHomomorphism,
    #[error("group order {order} exceeds enumeration cap {cap}")]
    CapExceeded { order: String, cap: u64 },
    #[error("transversal of size {size} exceeds cap {cap}")]
    TransversalCapExceeded { size: String, cap: u64 },
    #[error("partition does not refine the other")]
    NotRefinement,
    #[error("empty point set")]
    EmptySet,
    #[error("structurally invalid partition sequence: {0}")]
    StructurallyInvalid(String),
    #[error("group is not a subgroup of the ambient group")]
    NotSubgroup,
    #[error("cosets do not share an ambient domain")]
    InconsistentAmbient,
    #[error("string lengths or alphabet do not match the domain")]
    BadString,
    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),
    #[error("not a Johnson action")]
    NotJohnson,
    #[error("inducing permutation is ambiguous for m = {0}")]
    AmbiguousSmallM(usize),
    #[error("permutation of subsets is not induced by a point permutation")]
    NotInduced,
    #[error("recognition failed: {0}")]
    RecognitionFailed(String),
    #[error("classification failed: {0}")]
    ClassificationFailed(String),
    #[error("first test set is full; comparison needs a non-full set")]
    T1FullViolation,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degree {degree} exceeds bound {bound}")]
    DegreeExceeded { degree: usize, bound: usize },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
