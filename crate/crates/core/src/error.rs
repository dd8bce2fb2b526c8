use thiserror::Error;

/// Errors raised by the operator, clock, synchronization and group routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch ({left} vs {right})")]
    DimensionMismatch {
        op: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("{0}: non-finite entry")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("basis columns are not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("clock label list is empty")]
    EmptyLabels,

    #[error("initial state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("initial state lies outside the synchronization kernel (residual {residual:e})")]
    OutsideKernel { residual: f64 },

    #[error("synchronization kernel is trivial")]
    TrivialKernel,

    #[error("perturbation direction commutes with K; cannot normalize")]
    DegenerateDirection,

    #[error("unknown group '{0}'")]
    UnknownGroup(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid character table: {0}")]
    InvalidCharacterTable(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("multiplicity of irrep '{irrep}' is not an integer (value {value}, rounding error {error:e})")]
    MultiplicityRounding {
        irrep: String,
        value: f64,
        error: f64,
    },

    #[error("isotypic projector for '{irrep}' is not idempotent (residual {residual:e})")]
    ProjectorNotIdempotent { irrep: String, residual: f64 },

    #[error("irrep '{irrep}' occurs with multiplicity {multiplicity} in {side}; only multiplicity-free representations are supported")]
    NotMultiplicityFree {
        irrep: String,
        side: &'static str,
        multiplicity: usize,
    },

    #[error("observable is not equivariant (max commutator {residual:e})")]
    NotEquivariant { residual: f64 },

    #[error("class function differs between class {class} and its inverse class {inverse_class}")]
    ClassFunctionNotInverseSymmetric { class: usize, inverse_class: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
