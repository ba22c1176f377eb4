use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use alloc::boxed::Box;

use crate::criteria::CriterionReport;
use crate::expr::ScalarExpr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("a chart needs at least one coordinate")]
    Empty,
    #[error("invalid coordinate name `{0}`")]
    InvalidName(String),
    #[error("duplicate coordinate name `{0}`")]
    DuplicateName(String),
    #[error("expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("value of `{0}` is not finite")]
    NonFinite(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainErrorKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    NegativeBaseFractionalPower,
    Atan2Origin,
    NonFinite,
}

/// Evaluation left the domain of a node; `node` is the offending subexpression.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error ({kind:?})")]
pub struct DomainError {
    pub kind: DomainErrorKind,
    pub node: ScalarExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("field has {found} components on a {expected}-dimensional chart")]
    ComponentCount { expected: usize, found: usize },
    #[error("coordinate index {index} outside a {dimension}-dimensional chart")]
    CoordinateOutOfRange { index: usize, dimension: usize },
    #[error("operands live on different charts")]
    ChartMismatch,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainSetupError {
    #[error("box needs one interval per coordinate ({expected}), found {found}")]
    BoxDimension { expected: usize, found: usize },
    #[error("empty interval for `{0}`: lower bound must be below upper bound")]
    EmptyInterval(String),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("guards rejected too many candidates ({accepted} of {requested} accepted after {attempts} attempts)")]
    GuardTooRestrictive {
        requested: usize,
        accepted: usize,
        attempts: usize,
    },
    #[error("invalid tolerance `{0}`")]
    InvalidTolerance(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriteriaError {
    #[error("no sampled point qualified for {context}")]
    AllPointsSkipped { context: String },
    #[error("degenerate basis for {context}: {skipped} of {total} points skipped")]
    DegenerateBasis {
        context: String,
        skipped: usize,
        total: usize,
    },
    #[error("singular factor {factor}: |value| = {value:e} below guard at {point:?}")]
    SingularFactor {
        factor: String,
        value: f64,
        point: Vec<f64>,
    },
    #[error("precondition `{which}` violated: residual {residual:e} exceeds {tolerance:e}")]
    PreconditionResidual {
        which: String,
        residual: f64,
        tolerance: f64,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QbhError {
    #[error("fields do not satisfy the three-field algebra (max residual {:e})", .0.max_residual())]
    DeltaViolated(Box<CriterionReport>),
    #[error("X1(X2(H)) does not vanish (max residual {:e})", .0.max_residual())]
    HamiltonianConditionViolated(Box<CriterionReport>),
    #[error("rho = -X3(F) vanishes or changes sign: min |rho| = {min_abs:e} at {point:?}")]
    NonVanishingRho {
        min_abs: f64,
        point: Vec<f64>,
        sign_change: bool,
    },
    #[error("F is not an integral of XH: |{{H,F}}| = {residual:e} at {point:?}")]
    NotAnIntegral { residual: f64, point: Vec<f64> },
    #[error("a term of the bivector is not Poisson (max residual {:e})", .0.max_residual())]
    NotPoisson(Box<CriterionReport>),
    #[error("at least one triple of test functions is required")]
    NoTestFunctions,
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
}
