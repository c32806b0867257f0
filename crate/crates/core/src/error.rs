use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input is malformed or violates a precondition.
    Validation,
    /// The instance is larger than the configured desk-scale cap.
    DeskScale,
    /// An internal postcondition failed. Always a bug.
    Invariant,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cyclic factor order must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("operands belong to different groups or have mismatched shapes")]
    GroupMismatch,
    #[error("index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: u64, order: u64 },
    #[error("{what} is {size}, above the desk-scale cap {cap}")]
    DeskScale { what: &'static str, size: u64, cap: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is nonsingular; a singular matrix is required")]
    Nonsingular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("input vectors are linearly dependent")]
    DependentVectors,
    #[error("empty set where a non-empty one is required")]
    EmptySet,
    #[error("set {index} does not generate the group")]
    NotGenerating { index: usize },
    #[error("basis {index} is not a basis of F_p^r")]
    NotABasis { index: usize },
    #[error("lattice is not p-oblique: block {block} is forced by vector {witness:?}")]
    NotOblique { block: usize, witness: Vec<u64> },
    #[error("rows of block {block} are not in the span of the other blocks")]
    RowSpaceInclusion { block: usize },
    #[error("field of order {p} is smaller than the number of blocks {k}")]
    FieldTooSmall { k: usize, p: u64 },
    #[error("lattice is not of full rank; add p times the unit vectors to make it full rank")]
    RankDeficient,
    #[error("no non-vanishing diagonal found after {trials} evaluations")]
    DiagonalSearchFailed { trials: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    InvariantBreach(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::DeskScale { .. } => ErrorClass::DeskScale,
            Error::InvariantBreach(_) | Error::DiagonalSearchFailed { .. } => ErrorClass::Invariant,
            _ => ErrorClass::Validation,
        }
    }

    /// Stable snake_case identifier for machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidModulus(_) => "invalid_modulus",
            Error::Overflow(_) => "overflow",
            Error::GroupMismatch => "group_mismatch",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::DeskScale { .. } => "desk_scale_cap",
            Error::NotPrime(_) => "not_prime",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::Singular => "singular",
            Error::Nonsingular => "nonsingular",
            Error::Inconsistent => "inconsistent",
            Error::DependentVectors => "dependent_vectors",
            Error::EmptySet => "empty_set",
            Error::NotGenerating { .. } => "not_generating",
            Error::NotABasis { .. } => "not_a_basis",
            Error::NotOblique { .. } => "not_oblique",
            Error::RowSpaceInclusion { .. } => "row_space_inclusion",
            Error::FieldTooSmall { .. } => "field_too_small",
            Error::RankDeficient => "rank_deficient",
            Error::DiagonalSearchFailed { .. } => "diagonal_search_failed",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvariantBreach(_) => "invariant_breach",
        }
    }
}
