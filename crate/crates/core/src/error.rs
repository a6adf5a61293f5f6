//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, BxError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BxError {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("carrier `{carrier}` lists `{element}` twice")]
    DuplicateElement { carrier: String, element: String },

    #[error("value `{value}` is not an element of carrier `{carrier}`")]
    OutsideCarrier { carrier: String, value: String },

    #[error("{context}: carrier `{left}` does not match carrier `{right}`")]
    CarrierMismatch {
        context: String,
        left: String,
        right: String,
    },

    #[error("effect tag mismatch: expected {expected}, found {found}")]
    TagMismatch { expected: String, found: String },

    #[error("{context}: effect `{left}` does not match effect `{right}`")]
    EffectMismatch {
        context: String,
        left: String,
        right: String,
    },

    #[error("membership is not defined for effect `{0}`")]
    UnsupportedMembership(String),

    #[error("{what}: {needed} candidates exceed the bound of {bound}")]
    BoundExceeded {
        what: String,
        needed: u128,
        bound: u128,
    },

    #[error("invalid monoid: {0}")]
    InvalidMonoid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("pure (identity-effect) spans required: {0}")]
    NonPureInput(String),

    #[error("invalid equivalence chain: {0}")]
    InvalidChain(String),

    #[error("consistency violated: {0}")]
    ConsistencyViolation(String),

    #[error("no span of full lenses witnesses this bisimulation: {0}")]
    NoSpanWitness(String),
}

impl BxError {
    pub fn bound(what: impl Into<String>, needed: u128, bound: u128) -> BxError {
        BxError::BoundExceeded {
            what: what.into(),
            needed,
            bound,
        }
    }
}
