//! Proof-step policies: the trainable stand-in for the language model.
//!
//! A policy answers "given this proof state (and the previous step as
//! context), what step should be tried next?" with a ranked, sampled list of
//! candidates. [`retrieval`] implements the real, trainable policy;
//! [`scripted`] is a deterministic test double for exercising the search
//! layer in isolation.

pub mod retrieval;
pub mod scripted;
pub mod tokenize;

use crate::corpus::datapoint::HAMMER_TOKEN;
use crate::logic::parse::parse_step;

/// What the search layer asks the policy. Both fields are canonical
/// serializations: `proof_state` a proof-state string, `context` the previous
/// step (or empty at the root).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyQuery {
    pub context: String,
    pub proof_state: String,
}

/// One proposed step. `log_prob` is the log of the policy's untempered
/// probability: temperature shapes sampling order, never the value reported
/// here, so search priorities are temperature-independent.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub step_text: String,
    pub log_prob: f64,
}

impl Candidate {
    /// A candidate is well-formed if it parses as a step or is `<hammer>`.
    pub fn is_well_formed(&self) -> bool {
        self.step_text == HAMMER_TOKEN || parse_step(&self.step_text).is_ok()
    }
}

/// A suggestion batch. `fallback` marks answers produced without any index
/// overlap (the global-frequency fallback). `support` lists the distinct
/// steps the policy's untempered distribution puts mass on, sorted; it is
/// computed before sampling, so two runs differing only in temperature see
/// identical supports at identical queries.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Suggestions {
    pub candidates: Vec<Candidate>,
    pub support: Vec<String>,
    pub fallback: bool,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PolicyError {
    #[error("corpus has no train datapoints")]
    EmptyTrainSplit,
    #[error("model has an empty index")]
    UntrainedModel,
    #[error("temperature must be positive, got {0}")]
    BadTemperature(f64),
    #[error("must request at least one candidate")]
    ZeroSamples,
    #[error("model file is not a policy model (bad magic)")]
    BadMagic,
    #[error("unsupported model file version {0}")]
    BadVersion(u32),
    #[error("io error: {0}")]
    Io(String),
    #[error("model payload is corrupt: {0}")]
    CorruptPayload(String),
}

/// The boundary the search layer sees; trained models are immutable, so
/// `suggest` is pure given its arguments.
pub trait ProofPolicy: Send + Sync {
    fn suggest(
        &self,
        query: &PolicyQuery,
        n: usize,
        temperature: f64,
        rng_seed: u64,
    ) -> Result<Suggestions, PolicyError>;
}
