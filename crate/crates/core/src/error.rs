use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("jet order {order} exceeds the supported cap of {cap}")]
    JetOrderExceeded { order: usize, cap: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("zero raised to a negative power")]
    ZeroToNegativePower,

    #[error("variable `{0}` has no assigned value")]
    Unassigned(String),

    #[error("denominator evaluated to {0:e}, below the numeric threshold")]
    NumericDivisionByZero(f64),

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("expression contains elementary functions where a rational expression is required")]
    NotRational,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("unsupported prolongation order {0}")]
    UnsupportedOrder(usize),

    #[error("operator is not the equivalence-group generator")]
    NotGenerator,

    #[error("coefficient of d/d{target} is not linear in the formal xi symbols")]
    NotLinearInXi { target: String },

    #[error("operator coefficients contain formal xi symbols")]
    FormalSymbols,

    #[error("coordinate {0} is missing from the declared column order")]
    MissingCoordinate(String),

    #[error("symbolic rank {symbolic} disagrees with sampled rank {sampled}")]
    RankMismatch { symbolic: usize, sampled: usize },

    #[error("pivot submatrix is singular")]
    SingularPivot,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("psi^{index}' vanishes near y = {at}")]
    ZeroDerivative { index: usize, at: f64 },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("malformed input: {0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
