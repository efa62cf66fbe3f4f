//! Prover/Delayer games over well-orders on the naturals.
//!
//! The crate is layered bottom-up:
//!
//! * [`ordinal`]: Cantor normal form arithmetic below epsilon-zero.
//! * [`tree`]: game trees, combs and the tree clock.
//! * [`wellorder`]: computable presentations of well-orders of a given order type.
//! * [`game`]: positions, transitions, measures and the referee loop.
//! * [`strategy`]: explicit strategies and adversaries.
//! * [`logic`]: formulas, forcing, and the derivation checker.
//! * [`extraction`]: turning a checked derivation of transfinite induction into a Prover.

pub mod extraction;
pub mod game;
pub mod logic;
pub mod ordinal;
pub mod strategy;
pub mod tree;
pub mod wellorder;

pub use game::{Outcome, PartialPredicate, Position, Position1, Reason};
pub use ordinal::Ordinal;
pub use tree::{GameTree, NodePath};
pub use wellorder::WellOrderCodec;
