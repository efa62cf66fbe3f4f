//! Second-order arithmetic fragment: syntax, evaluation under partial
//! predicates, and the derivation checker.

mod eval;
mod fixture;
mod proof;
mod syntax;

pub use eval::*;
pub use fixture::{ti_omega_derivation, ti_omega_derivation_with_cut};
pub use proof::*;
pub use syntax::*;
