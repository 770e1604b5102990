use thiserror::Error;

use crate::algebra::Element;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("table is not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(Element, Element, Element),
    #[error("element {0} is not a two-sided identity")]
    NoIdentity(Element),
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("monoid is not commutative: {0}*{1} != {1}*{0}")]
    NotCommutative(Element, Element),
    #[error("element {0} is not regular")]
    NotRegular(Element),
    #[error("subset does not generate the monoid")]
    NotGenerating,
    #[error("cartesian power has {size} elements, above the cap of {cap}")]
    PowerTooLarge { size: usize, cap: usize },
    #[error("target monoid is not commutative and completely regular")]
    TargetNotRegularCommutative,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("relation is not a coset: {0}")]
    NotACoset(String),
    #[error("relation is not closed under products")]
    NotProductClosed,
    #[error("no relational homomorphism from the left template to the right template")]
    PromiseViolation,
    #[error("homomorphism images do not commute")]
    NonCommutingImages,
    #[error("witness is invalid: {0}")]
    WitnessInvalid(String),
    #[error("search space of {size} exceeds the cap of {cap}")]
    SearchCapExceeded { size: usize, cap: usize },
    #[error("construction too large: {0}")]
    TooLarge(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
