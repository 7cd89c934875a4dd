//! Training datapoints: one (context, state, step) record per proof position.

use crate::logic::goal::{Theorem, TheoremLibrary};
use crate::logic::kernel::{apply_step, ProofFailure};
use crate::logic::goal::ProofState;
use crate::logic::parse::parse_step;
use serde::{Deserialize, Serialize};

/// The policy-facing action token that defers a step to the hammer.
pub const HAMMER_TOKEN: &str = "<hammer>";

/// One serialized proof position. `context` is the previous step's text
/// (empty at the first position), `state` the canonical pre-step state,
/// `step` the canonical target step or the literal `<hammer>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Datapoint {
    pub theorem: String,
    pub context: String,
    pub state: String,
    pub step: String,
    /// Filled by preprocessing; generation leaves it unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hammer_solvable: Option<bool>,
}

#[derive(Debug, thiserror::Error)]
pub enum DatapointError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("datapoint step `{0}` is neither a proof step nor `{HAMMER_TOKEN}`")]
    BadStep(String),
    #[error("datapoint context `{0}` is neither empty nor a proof step")]
    BadContext(String),
}

impl Datapoint {
    /// The exact prompt string the policy consumes.
    pub fn prompt(&self) -> String {
        prompt_string(&self.context, &self.state)
    }

    /// The exact training target.
    pub fn target(&self) -> String {
        format!("{} <EOS>", self.step)
    }

    /// Grammar-level sanity: the step is a parseable step or `<hammer>`,
    /// the context is empty or a parseable step.
    pub fn validate(&self) -> Result<(), DatapointError> {
        if self.step != HAMMER_TOKEN && parse_step(&self.step).is_err() {
            return Err(DatapointError::BadStep(self.step.clone()));
        }
        if !self.context.is_empty() && parse_step(&self.context).is_err() {
            return Err(DatapointError::BadContext(self.context.clone()));
        }
        Ok(())
    }
}

/// Builds the prompt for an arbitrary (context, state) pair; searches query
/// the policy with states that never came from a stored datapoint.
pub fn prompt_string(context: &str, state: &str) -> String {
    format!("<SOS> <CTXT> {context} <PRF_STT> {state} <PRF_STP>")
}

/// One JSON object, no trailing newline: the on-disk JSONL record.
pub fn serialize_datapoint(dp: &Datapoint) -> String {
    serde_json::to_string(dp).expect("datapoint serialization cannot fail")
}

pub fn parse_datapoint(s: &str) -> Result<Datapoint, DatapointError> {
    serde_json::from_str(s).map_err(|e| DatapointError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Replays `theorem`'s ground-truth proof and records a datapoint at every
/// position: context = previous step's text, state = pre-step state, step =
/// the step's text. `<hammer>` never appears in ground truth, so contexts
/// are always real steps.
pub fn datapoints_of(
    theorem: &Theorem,
    library: &TheoremLibrary,
) -> Result<Vec<Datapoint>, ProofFailure> {
    let mut state = ProofState::initial(&theorem.statement);
    let mut out = Vec::with_capacity(theorem.ground_truth_proof.len());
    for (i, step) in theorem.ground_truth_proof.iter().enumerate() {
        out.push(Datapoint {
            theorem: theorem.name.clone(),
            context: if i == 0 {
                String::new()
            } else {
                theorem.ground_truth_proof[i - 1].canonical_string()
            },
            state: state.canonical_string(),
            step: step.canonical_string(),
            hammer_solvable: None,
        });
        state = apply_step(library, &state, step).map_err(|error| ProofFailure {
            step_index: i,
            error,
        })?;
    }
    if !state.goals.is_empty() {
        return Err(ProofFailure {
            step_index: theorem.ground_truth_proof.len(),
            error: crate::logic::kernel::KernelError::Incomplete(state.goals.len()),
        });
    }
    Ok(out)
}
