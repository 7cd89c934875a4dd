//! Training-data preprocessing: replace hammer-solvable targets with `<hammer>`.
//!
//! For every train-split datapoint, run the hammer on the recorded proof
//! state; where it closes the first goal, the training target becomes the
//! literal `<hammer>` token. The prompt side (context and state) is never
//! modified, and the valid/test splits pass through untouched. A model
//! trained on the result learns *when* to call the hammer instead of
//! memorizing certificate steps it could never reproduce.
//!
//! The trace shortcut skips the hammer for datapoints whose ground-truth
//! step is already a `by_cert` step: those certificates came from the
//! hammer in the first place, so the outcome is known. Shortcut and full
//! runs agree wherever the budget lets the hammer re-find the proof.

use crate::corpus::datapoint::{Datapoint, HAMMER_TOKEN};
use crate::corpus::split::SplitLabel;
use crate::corpus::Corpus;
use crate::hammer::run::{hammer, HammerBudget};
use crate::logic::goal::TheoremLibrary;
use crate::logic::parse::parse_state;
use crate::logic::step::ProofStep;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PreprocessError {
    #[error("datapoint for `{theorem}` does not replay: {message}")]
    StateReplay { theorem: String, message: String },
}

/// What one preprocessing pass did. `replaced` counts train datapoints
/// whose target ended up as `<hammer>` (including `shortcut`, the subset
/// replaced without running the hammer); `kept` the train datapoints left
/// unchanged. `fraction_replaced` is replaced over all train datapoints.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PreprocessReport {
    pub replaced: usize,
    pub kept: usize,
    pub shortcut: usize,
    pub hammer_calls: usize,
    pub fraction_replaced: f64,
}

/// Run the hammer on one datapoint's state and rewrite its target if the
/// first goal closes. Errors when the recorded state no longer parses
/// against the library (a corrupt or mismatched corpus).
pub fn preprocess_datapoint(
    dp: &Datapoint,
    library: &TheoremLibrary,
    budget: &HammerBudget,
) -> Result<Datapoint, PreprocessError> {
    let state = parse_state(&dp.state, &library.signature).map_err(|e| {
        PreprocessError::StateReplay {
            theorem: dp.theorem.clone(),
            message: e.to_string(),
        }
    })?;
    let goal = state
        .first_goal()
        .ok_or_else(|| PreprocessError::StateReplay {
            theorem: dp.theorem.clone(),
            message: "state has no open goals".into(),
        })?;
    Ok(if hammer(library, goal, budget).proved() {
        Datapoint {
            step: HAMMER_TOKEN.into(),
            hammer_solvable: Some(true),
            ..dp.clone()
        }
    } else {
        Datapoint {
            hammer_solvable: Some(false),
            ..dp.clone()
        }
    })
}

enum Job {
    /// Not in the train split: copy through unchanged.
    Untouched,
    /// Ground-truth step is a certificate step: replace without hammering.
    Shortcut,
    /// Run the hammer on the recorded state.
    Hammer,
}

/// Preprocess every train datapoint of `corpus`, returning the rewritten
/// corpus and a report. Idempotent: prompts are never modified, so a second
/// pass hammers the same states and reaches the same targets.
pub fn preprocess_corpus(
    corpus: &Corpus,
    budget: &HammerBudget,
    use_trace_shortcut: bool,
) -> Result<(Corpus, PreprocessReport), PreprocessError> {
    // Which ground-truth positions are certificate steps, per theorem. The
    // i-th datapoint of a theorem records the state before its i-th step.
    let ground: BTreeMap<&str, Vec<bool>> = corpus
        .theorems
        .iter()
        .map(|t| {
            let flags = t
                .ground_truth_proof
                .iter()
                .map(|s| matches!(s, ProofStep::ByCertificate(_)))
                .collect();
            (t.name.as_str(), flags)
        })
        .collect();

    let mut position: BTreeMap<&str, usize> = BTreeMap::new();
    let jobs: Vec<Job> = corpus
        .datapoints
        .iter()
        .map(|dp| {
            if corpus.split.assignment.get(&dp.theorem) != Some(&SplitLabel::Train) {
                return Job::Untouched;
            }
            let slot = position.entry(dp.theorem.as_str()).or_insert(0);
            let pos = *slot;
            *slot += 1;
            let is_cert = use_trace_shortcut
                && ground
                    .get(dp.theorem.as_str())
                    .and_then(|flags| flags.get(pos))
                    .copied()
                    .unwrap_or(false);
            if is_cert {
                Job::Shortcut
            } else {
                Job::Hammer
            }
        })
        .collect();

    let processed: Vec<Result<Datapoint, PreprocessError>> = corpus
        .datapoints
        .par_iter()
        .zip(jobs.par_iter())
        .map(|(dp, job)| match job {
            Job::Untouched => Ok(dp.clone()),
            Job::Shortcut => Ok(Datapoint {
                step: HAMMER_TOKEN.into(),
                hammer_solvable: Some(true),
                ..dp.clone()
            }),
            Job::Hammer => preprocess_datapoint(dp, &corpus.library, budget),
        })
        .collect();

    let mut datapoints = Vec::with_capacity(processed.len());
    for result in processed {
        datapoints.push(result?);
    }

    let mut report = PreprocessReport {
        hammer_calls: jobs.iter().filter(|j| matches!(j, Job::Hammer)).count(),
        shortcut: jobs.iter().filter(|j| matches!(j, Job::Shortcut)).count(),
        ..PreprocessReport::default()
    };
    for (dp, job) in datapoints.iter().zip(&jobs) {
        if matches!(job, Job::Untouched) {
            continue;
        }
        if dp.step == HAMMER_TOKEN {
            report.replaced += 1;
        } else {
            report.kept += 1;
        }
    }
    let train_total = report.replaced + report.kept;
    if train_total > 0 {
        report.fraction_replaced = report.replaced as f64 / train_total as f64;
    }

    let out = Corpus {
        datapoints,
        ..corpus.clone()
    };
    Ok((out, report))
}
