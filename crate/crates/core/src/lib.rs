//! Lenses, monadic lenses, symmetric lenses and spans over finite carriers,
//! with exhaustive law checkers and executable equivalence constructions.

pub mod corpus;
pub mod effects;
pub mod equivalence;
pub mod error;
pub mod fixtures;
pub mod lens;
pub mod mlens;
pub mod report;
pub mod spans;
pub mod symmetric;
pub mod value;

pub use effects::{Bounds, Effect, EffectValue, Monoid};
pub use error::{BxError, Result};
pub use report::{LawReport, Violation};
pub use value::{Carrier, Value};
