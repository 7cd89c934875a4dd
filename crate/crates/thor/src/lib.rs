//! A desk-scale neuro-symbolic theorem prover.
//!
//! The pieces, bottom to top:
//!
//! - [`logic`]: first-order terms and formulas, the tactic kernel, finite
//!   models, and a bit-exact text grammar for everything the system prints
//!   or parses.
//! - [`hammer`]: premise selection over the fact library, a given-clause
//!   resolution loop, and certificates the kernel can replay skeptically.
//! - [`corpus`]: a deterministic generator for theory libraries, theorems
//!   with ground-truth tactic proofs, and training datapoints.
//! - [`policy`]: a retrieval-based proof-step policy with temperature
//!   sampling — the trainable stand-in for a language model.
//! - [`search`]: datapoint preprocessing (hammer-solvable steps collapse to
//!   `<hammer>`) and best-first proof search over policy suggestions.
//! - [`harness`]: the evaluation matrix (policy-only / hammer-only /
//!   combined), ablations, and report assembly.

pub mod corpus;
pub mod hammer;
pub mod harness;
pub mod logic;
pub mod policy;
pub mod search;
