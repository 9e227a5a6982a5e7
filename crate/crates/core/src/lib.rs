//! Supersimple D4-extensions of k((t)) in characteristic 2 and their lifts
//! to characteristic 0.

pub mod artin_schreier;
pub mod error;
pub mod field;
pub mod laurent;
pub mod lift;
pub mod parse;
pub mod symbolic;
pub mod tower;
pub mod witt;

pub use error::{Error, Result};
pub use field::{ExtensionPolicy, FieldElem, FieldSpec};
pub use laurent::{LaurentPoly, Var};
