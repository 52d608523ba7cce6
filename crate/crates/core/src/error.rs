use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix columns are linearly dependent")]
    RankDeficient,
    #[error("lattice basis is singular")]
    SingularLattice,
    #[error("sublattice is not contained in the given lattice")]
    NotContained,
    #[error("group of order {order} exceeds the enumeration bound {bound}")]
    TooLarge { order: u64, bound: u64 },
    #[error("vector {0:?} is not in the large lattice (H is not integral on it)")]
    NotInLargeLattice(Vec<i64>),
    #[error("vector {0:?} is not in the small lattice")]
    NotInSmallLattice(Vec<i64>),
    #[error("vector {0:?} is not in the lattice")]
    NotInLattice(Vec<i64>),
    #[error("class is not rational: the commutator pairing has non-torsion value {0}")]
    NotRationalClass(String),
    #[error("value leaves the monomial model: {0}")]
    OutsideModel(String),
    #[error("bundles live over different ambient tori")]
    AmbientMismatch,
    #[error("bundle has no summands")]
    EmptyBundle,
    #[error("line bundles live on different lattices")]
    LatticeMismatch,
    #[error("bundle is not compatible with the given lattice")]
    NotCompatible,
    #[error("slope does not match the requested class")]
    SlopeMismatch,
    #[error("moduli points belong to different classes or lattices")]
    MixedClasses,
    #[error("tropical matrices have different sizes")]
    SizeMismatch,
    #[error("tropical matrix is not invertible")]
    NotInvertible,
    #[error("representation images do not commute")]
    NotCommuting,
    #[error("lattice is not admissible for the class")]
    NotAdmissible,
    #[error("invalid value: {0}")]
    Invalid(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },
}

impl Error {
    /// Process exit code used by the command-line interface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TooLarge { .. } => 3,
            Error::Inconsistent(_) => 4,
            _ => 2,
        }
    }
}
