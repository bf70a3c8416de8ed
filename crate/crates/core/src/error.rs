use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("k = {k} exceeds the enumeration limit of {limit} rules")]
    TooManyRules { k: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter vector: {0}")]
    InvalidParameter(String),
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("information matrix is singular (design support does not span the model)")]
    SingularInformation,
    #[error("design is not saturated: {0}")]
    NotSaturated(String),
    #[error("regression vectors of the saturated support are linearly dependent")]
    SingularSupport,
    #[error("operation requires interaction order d = {expected}, got {got}")]
    WrongInteractionOrder { expected: usize, got: usize },
    #[error("empty grid")]
    EmptyGrid,
    #[error("predicate takes the same value at both ends of [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("start point is not strictly feasible")]
    InfeasibleStart,
    #[error("point is not in the affine hull of the polytope (residual {residual:e})")]
    NotInAffineHull { residual: f64 },
    #[error("log det decreased at iteration {iteration}: {before} -> {after}")]
    NonMonotone { iteration: usize, before: f64, after: f64 },
    #[error("optimizer did not reach the equivalence-theorem bound within {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),
    #[error("parse error: {0}")]
    Parse(String),
}
