use thiserror::Error;

use crate::payoff_expr::ExprError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at position {0}")]
    NonFinite(usize),

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("invalid seminorm `{id}`: {reason}")]
    InvalidSeminorm { id: String, reason: String },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("order interval is empty")]
    EmptyInterval,

    #[error("set is empty")]
    EmptySet,

    #[error("invalid box: lower corner exceeds upper corner at coordinate {0}")]
    InvalidBox(usize),

    #[error("negative measure input: {0}")]
    NegativeInput(f64),

    #[error("point lies outside the domain of `{map}`")]
    OutsideDomain { map: String },

    #[error("image of `{map}` leaves the declared codomain")]
    CodomainViolation { map: String },

    #[error("evaluation of `{map}` failed: {reason}")]
    Evaluation { map: String, reason: String },

    #[error("map `{map}` is not singleton-valued")]
    NotSingleton { map: String },

    #[error("sequence {0} is not monotone under the cone order")]
    NonMonotoneSequence(usize),

    #[error("window {window} exceeds the {available} step differences in the trace")]
    WindowTooLarge { window: usize, available: usize },

    #[error("image set grew past the cap of {cap} points")]
    ImageExplosion { cap: usize },

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("empty section: {0}")]
    EmptySection(String),

    #[error(transparent)]
    Expr(#[from] ExprError),
}
