//! Ablations: rerun the full protocol with one ingredient changed at a time.

use super::config_file::RunConfig;
use super::eval::{run_eval, run_eval_with_mode, EvalError, EvalInputs, EvalRun, SystemSet, TraceMap};
use crate::policy::retrieval::train;
use crate::policy::PolicyError;
use crate::search::{SearchMode, TraceEvent};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// The base protocol next to its three ablations:
/// raw training data with keyword dispatch, a context-free model, and
/// sampling at temperature 1.0.
#[derive(Debug)]
pub struct AblationSet {
    pub base: EvalRun,
    pub learning_how: EvalRun,
    pub no_context: EvalRun,
    pub temperature: EvalRun,
    pub comparison_table: String,
}

impl AblationSet {
    /// Variants with stable directory-friendly names, base first.
    pub fn variants(&self) -> [(&'static str, &EvalRun); 4] {
        [
            ("base", &self.base),
            ("learning_how", &self.learning_how),
            ("no_context", &self.no_context),
            ("temperature", &self.temperature),
        ]
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AblateError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("training the context-free model failed: {0}")]
    Train(#[from] PolicyError),
}

/// Run the base protocol and its three ablations over the test split.
/// `inputs` must carry everything: the learning-how variant searches with the
/// raw-corpus model, and the context-free model is trained here in-process.
pub fn run_ablations(
    inputs: &EvalInputs,
    config: &RunConfig,
    seed: u64,
    jobs: usize,
) -> Result<AblationSet, AblateError> {
    let systems = SystemSet::thor_only();
    let base = run_eval(inputs, config, systems, seed, jobs)?;

    // Learning-how: the model saw raw traces (memorized certificates), and
    // certificate-intent steps are dispatched to the hammer by keyword.
    let raw_model = inputs.raw_model.ok_or_else(|| EvalError::MissingInput {
        system: "learning_how".into(),
        what: "a model trained on the raw corpus".into(),
    })?;
    let raw_as_thor = EvalInputs {
        corpus: inputs.corpus,
        preprocessed: Some(inputs.corpus),
        raw_model: None,
        preprocessed_model: Some(raw_model),
    };
    let learning_how = run_eval_with_mode(
        &raw_as_thor,
        config,
        systems,
        seed,
        jobs,
        SearchMode::LearningHow,
    )?;

    // No-context: same preprocessed data, but the model ignores the proof
    // context at train and query time.
    let prep = inputs.preprocessed.ok_or_else(|| EvalError::MissingInput {
        system: "no_context".into(),
        what: "the preprocessed corpus".into(),
    })?;
    let context_free = train(prep, false)?;
    let context_free_inputs = EvalInputs {
        corpus: inputs.corpus,
        preprocessed: Some(prep),
        raw_model: None,
        preprocessed_model: Some(&context_free),
    };
    let no_context = run_eval(&context_free_inputs, config, systems, seed, jobs)?;

    // Temperature 1.0: identical model and budgets, flatter sampling.
    let mut flat = config.clone();
    flat.search.temperature = 1.0;
    let temperature = run_eval(inputs, &flat, systems, seed, jobs)?;

    let comparison_table = render_ablation_table(&AblationRow::collect(&[
        ("thor (base)", &base),
        ("learning-how", &learning_how),
        ("no-context", &no_context),
        ("temperature=1.0", &temperature),
    ]));
    Ok(AblationSet {
        base,
        learning_how,
        no_context,
        temperature,
        comparison_table,
    })
}

struct AblationRow {
    name: &'static str,
    solved: usize,
    total: usize,
    percent: f64,
}

impl AblationRow {
    fn collect(runs: &[(&'static str, &EvalRun)]) -> Vec<AblationRow> {
        runs.iter()
            .map(|(name, run)| {
                let rate = run
                    .report
                    .rates
                    .thor
                    .expect("ablation runs evaluate the thor system");
                AblationRow {
                    name,
                    solved: rate.solved,
                    total: rate.total,
                    percent: rate.percent,
                }
            })
            .collect()
    }
}

fn render_ablation_table(rows: &[AblationRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<20}{:>8}{:>8}{:>9}", "variant", "solved", "total", "rate");
    for row in rows {
        let _ = writeln!(
            out,
            "{:<20}{:>8}{:>8}{:>8.1}%",
            row.name, row.solved, row.total, row.percent
        );
    }
    out
}

/// Candidate supports per proof state, keyed by (theorem, state, incoming
/// step). Duplicate pruning makes each state unique within a search, and the
/// incoming step pins the retrieval context, so two runs over the same model
/// must agree wherever their keys coincide — whatever the temperature.
pub fn support_index(traces: &TraceMap) -> BTreeMap<(String, String, String), Vec<String>> {
    let mut out = BTreeMap::new();
    for (theorem, events) in traces {
        let mut incoming: BTreeMap<usize, String> = BTreeMap::new();
        incoming.insert(0, String::new());
        for event in events {
            match event {
                TraceEvent::Step {
                    step,
                    child: Some(child),
                    ..
                } => {
                    incoming.insert(*child, step.clone());
                }
                TraceEvent::Hammer {
                    step: Some(step),
                    child: Some(child),
                    ..
                } => {
                    incoming.insert(*child, step.clone());
                }
                TraceEvent::Expand {
                    node,
                    state,
                    support,
                    ..
                } => {
                    let context = incoming.get(node).cloned().unwrap_or_default();
                    out.insert(
                        (theorem.clone(), state.clone(), context),
                        support.clone(),
                    );
                }
                _ => {}
            }
        }
    }
    out
}

/// How two runs' supports line up: queries both runs made (same theorem,
/// state, and context) and how many of those disagree on the support.
pub fn compare_supports(a: &TraceMap, b: &TraceMap) -> (usize, usize) {
    let index_a = support_index(a);
    let index_b = support_index(b);
    let mut shared = 0;
    let mut mismatched = 0;
    for (key, support) in &index_a {
        if let Some(other) = index_b.get(key) {
            shared += 1;
            if support != other {
                mismatched += 1;
            }
        }
    }
    (shared, mismatched)
}
