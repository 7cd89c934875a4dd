//! Untyped first-order logic without equality: terms, formulas, a bit-exact
//! grammar, finite models, and the tactic kernel.

pub mod formula;
pub mod goal;
pub mod kernel;
pub mod model;
pub mod parse;
pub mod print;
pub mod step;
pub mod subst;
pub mod term;
