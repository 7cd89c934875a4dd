//! Evaluation: run the proving systems over a corpus's test split and
//! assemble a deterministic report.

use super::config_file::RunConfig;
use super::histogram::{premises_of_proof, Histogram};
use super::metrics::{premise_step_success_metric, PremiseStepMetric};
use crate::corpus::split::SplitLabel;
use crate::corpus::{CertStore, Corpus};
use crate::hammer::run::{hammer, HammerBudget};
use crate::hammer::saturate::SaturationStatus;
use crate::logic::goal::{ProofState, Theorem, TheoremLibrary};
use crate::logic::kernel::{apply_step, check_proof, is_proved};
use crate::policy::retrieval::RetrievalPolicyModel;
use crate::search::{best_first_search, SearchConfig, SearchMode, SearchOutcome, TraceEvent};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Per-theorem search traces, keyed by theorem name.
pub type TraceMap = BTreeMap<String, Vec<TraceEvent>>;

/// Which systems to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSet {
    pub policy_only: bool,
    pub hammer_only: bool,
    pub thor: bool,
}

impl SystemSet {
    pub fn all() -> SystemSet {
        SystemSet {
            policy_only: true,
            hammer_only: true,
            thor: true,
        }
    }

    pub fn thor_only() -> SystemSet {
        SystemSet {
            thor: true,
            ..SystemSet::none()
        }
    }

    pub fn none() -> SystemSet {
        SystemSet {
            policy_only: false,
            hammer_only: false,
            thor: false,
        }
    }

    pub fn any(&self) -> bool {
        self.policy_only || self.hammer_only || self.thor
    }

    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.policy_only {
            out.push("policy_only".to_string());
        }
        if self.hammer_only {
            out.push("hammer_only".to_string());
        }
        if self.thor {
            out.push("thor".to_string());
        }
        out
    }
}

/// Corpora and trained models an evaluation may draw on. Only the pieces the
/// requested systems need must be present.
pub struct EvalInputs<'a> {
    /// The split corpus; its test split is the evaluation target.
    pub corpus: &'a Corpus,
    /// The preprocessed twin (train split rewritten); required for `thor`.
    pub preprocessed: Option<&'a Corpus>,
    /// Model trained on `corpus`; required for `policy_only`.
    pub raw_model: Option<&'a RetrievalPolicyModel>,
    /// Model trained on `preprocessed`; required for `thor`.
    pub preprocessed_model: Option<&'a RetrievalPolicyModel>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EvalError {
    #[error("{role} model was trained on `{model}` but the corpus fingerprint is `{corpus}`")]
    MismatchedModelFingerprint {
        role: String,
        model: String,
        corpus: String,
    },
    #[error("system `{system}` needs {what}")]
    MissingInput { system: String, what: String },
    #[error("corpus has no test-split theorems")]
    EmptyTestSplit,
    #[error("no systems requested")]
    NoSystems,
}

/// One system's verdict on one theorem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemResult {
    pub solved: bool,
    pub status: String,
    pub queries: usize,
    pub hammer_calls: u64,
    pub cost: u64,
    /// Distinct library premises the found proof cites.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub premises: Option<usize>,
    /// Canonical step strings of the found proof.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub proof: Option<Vec<String>>,
}

/// One matrix row; unevaluated systems are absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremOutcome {
    pub theorem: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub policy_only: Option<SystemResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hammer_only: Option<SystemResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub thor: Option<SystemResult>,
}

/// Solved count, denominator, and percent (one decimal).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateLine {
    pub solved: usize,
    pub total: usize,
    pub percent: f64,
}

impl RateLine {
    fn new(solved: usize, total: usize) -> RateLine {
        RateLine {
            solved,
            total,
            percent: super::percent(solved, total),
        }
    }
}

/// Success rates; union and thor-only are derived from the matrix, never from
/// extra runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub policy_only: Option<RateLine>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hammer_only: Option<RateLine>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub thor: Option<RateLine>,
    /// Theorems solved by the policy search or the standalone hammer.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub policy_union_hammer: Option<RateLine>,
    /// Theorems only thor solves: solved by thor, unsolved by both components.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub thor_only: Option<RateLine>,
}

/// Fingerprint echo of a model a run consumed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEcho {
    pub fingerprint: String,
    pub trained_on: String,
    pub use_context: bool,
}

impl ModelEcho {
    fn of(model: &RetrievalPolicyModel) -> ModelEcho {
        ModelEcho {
            fingerprint: model.fingerprint(),
            trained_on: model.trained_on.clone(),
            use_context: model.use_context,
        }
    }
}

/// The versioned evaluation report. Everything here is deterministic given
/// the corpus, models, config, and seed; wallclock lives in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub corpus_fingerprint: String,
    pub seed: u64,
    pub systems: Vec<String>,
    pub test_theorems: usize,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub policy_model: Option<ModelEcho>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub thor_model: Option<ModelEcho>,
    /// How the thor column dispatched `<hammer>`-intent steps.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub thor_mode: Option<String>,
    pub rates: Rates,
    pub matrix: Vec<TheoremOutcome>,
    /// Premises per found proof, per system.
    pub found_premise_histograms: BTreeMap<String, Histogram>,
    /// Premises per ground-truth proof of the theorems each system solved.
    pub ground_truth_premise_histograms: BTreeMap<String, Histogram>,
    /// Advance rates of premise-bearing vs premise-free candidates in the
    /// policy-only traces.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub premise_step_metric: Option<PremiseStepMetric>,
}

/// A finished evaluation: the report plus the raw search traces that back it.
#[derive(Debug)]
pub struct EvalRun {
    pub report: EvalReport,
    pub policy_traces: TraceMap,
    pub thor_traces: TraceMap,
}

/// Evaluate `systems` over the corpus's test split. Work is parallel across
/// theorems (`jobs` threads); results are merged by theorem index, so the
/// outcome matrix does not depend on `jobs`.
pub fn run_eval(
    inputs: &EvalInputs,
    config: &RunConfig,
    systems: SystemSet,
    seed: u64,
    jobs: usize,
) -> Result<EvalRun, EvalError> {
    run_eval_with_mode(inputs, config, systems, seed, jobs, SearchMode::Base)
}

/// Same as `run_eval`, with the thor column's dispatch mode exposed (the
/// learning-how ablation runs it as `SearchMode::LearningHow`).
pub(crate) fn run_eval_with_mode(
    inputs: &EvalInputs,
    config: &RunConfig,
    systems: SystemSet,
    seed: u64,
    jobs: usize,
    thor_mode: SearchMode,
) -> Result<EvalRun, EvalError> {
    if !systems.any() {
        return Err(EvalError::NoSystems);
    }
    let corpus = inputs.corpus;
    let test: Vec<&Theorem> = corpus.theorems_in(SplitLabel::Test);
    if test.is_empty() {
        return Err(EvalError::EmptyTestSplit);
    }

    let policy_setup = if systems.policy_only {
        let model = inputs.raw_model.ok_or_else(|| EvalError::MissingInput {
            system: "policy_only".into(),
            what: "a model trained on the raw corpus".into(),
        })?;
        check_fingerprint("policy", model, corpus)?;
        Some((model, corpus.cert_store()))
    } else {
        None
    };
    let thor_setup = if systems.thor {
        let prep = inputs.preprocessed.ok_or_else(|| EvalError::MissingInput {
            system: "thor".into(),
            what: "the preprocessed corpus".into(),
        })?;
        let model = inputs
            .preprocessed_model
            .ok_or_else(|| EvalError::MissingInput {
                system: "thor".into(),
                what: "a model trained on the preprocessed corpus".into(),
            })?;
        check_fingerprint("thor", model, prep)?;
        Some((prep, model, prep.cert_store()))
    } else {
        None
    };
    let standalone_budget = config.standalone_hammer_budget();

    struct Row {
        theorem: String,
        policy: Option<(SystemResult, Vec<TraceEvent>)>,
        hammer: Option<SystemResult>,
        thor: Option<(SystemResult, Vec<TraceEvent>)>,
    }
    let evaluate = |(index, thm): (usize, &&Theorem)| -> Row {
        let thm_seed = theorem_seed(seed, index);
        let policy = policy_setup.as_ref().map(|(model, store)| {
            run_search(
                &corpus.library,
                thm,
                *model,
                store,
                SearchMode::PolicyOnly,
                &config.search,
                thm_seed,
            )
        });
        let hammer = systems
            .hammer_only
            .then(|| run_hammer(&corpus.library, thm, &standalone_budget));
        let thor = thor_setup.as_ref().map(|(prep, model, store)| {
            run_search(
                &prep.library,
                thm,
                *model,
                store,
                thor_mode,
                &config.search,
                thm_seed,
            )
        });
        Row {
            theorem: thm.name.clone(),
            policy,
            hammer,
            thor,
        }
    };
    // Indexed parallel map: identical rows no matter the thread count.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let rows: Vec<Row> = pool.install(|| test.par_iter().enumerate().map(evaluate).collect());

    let mut matrix = Vec::with_capacity(rows.len());
    let mut policy_traces = TraceMap::new();
    let mut thor_traces = TraceMap::new();
    for row in rows {
        let mut outcome = TheoremOutcome {
            theorem: row.theorem.clone(),
            policy_only: None,
            hammer_only: row.hammer,
            thor: None,
        };
        if let Some((result, trace)) = row.policy {
            outcome.policy_only = Some(result);
            policy_traces.insert(row.theorem.clone(), trace);
        }
        if let Some((result, trace)) = row.thor {
            outcome.thor = Some(result);
            thor_traces.insert(row.theorem.clone(), trace);
        }
        matrix.push(outcome);
    }

    let premise_step_metric = systems
        .policy_only
        .then(|| premise_step_success_metric(policy_traces.values().map(|t| t.as_slice())));
    let report = EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        corpus_fingerprint: corpus.fingerprint(),
        seed,
        systems: systems.names(),
        test_theorems: matrix.len(),
        config: config.clone(),
        policy_model: policy_setup.as_ref().map(|(m, _)| ModelEcho::of(m)),
        thor_model: thor_setup.as_ref().map(|(_, m, _)| ModelEcho::of(m)),
        thor_mode: systems.thor.then(|| mode_name(thor_mode).to_string()),
        rates: compute_rates(&matrix, systems),
        found_premise_histograms: found_histograms(&matrix, systems),
        ground_truth_premise_histograms: ground_truth_histograms(&matrix, &test, systems),
        premise_step_metric,
        matrix,
    };
    Ok(EvalRun {
        report,
        policy_traces,
        thor_traces,
    })
}

fn check_fingerprint(
    role: &str,
    model: &RetrievalPolicyModel,
    corpus: &Corpus,
) -> Result<(), EvalError> {
    let fingerprint = corpus.fingerprint();
    if model.trained_on != fingerprint {
        return Err(EvalError::MismatchedModelFingerprint {
            role: role.to_string(),
            model: model.trained_on.clone(),
            corpus: fingerprint,
        });
    }
    Ok(())
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Every system sees the same per-theorem seed, decorrelated across theorems.
fn theorem_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(GOLDEN)
}

fn mode_name(mode: SearchMode) -> &'static str {
    match mode {
        SearchMode::Base => "base",
        SearchMode::PolicyOnly => "policy_only",
        SearchMode::LearningHow => "learning_how",
    }
}

#[allow(clippy::too_many_arguments)]
fn run_search(
    library: &TheoremLibrary,
    thm: &Theorem,
    model: &RetrievalPolicyModel,
    store: &CertStore,
    mode: SearchMode,
    config: &SearchConfig,
    seed: u64,
) -> (SystemResult, Vec<TraceEvent>) {
    let mut trace = Vec::new();
    let outcome = best_first_search(
        library,
        &thm.statement,
        model,
        Some(store),
        mode,
        config,
        seed,
        Some(&mut trace),
    );
    (search_result(library, thm, &outcome), trace)
}

fn search_result(library: &TheoremLibrary, thm: &Theorem, outcome: &SearchOutcome) -> SystemResult {
    // Report assembly re-checks every claimed proof against the kernel.
    if let Some(steps) = &outcome.proof {
        check_proof(library, &thm.statement, steps)
            .unwrap_or_else(|e| panic!("search proof of {} rejected by kernel: {e}", thm.name));
    }
    SystemResult {
        solved: outcome.proved(),
        status: outcome.status.as_str().to_string(),
        queries: outcome.stats.queries,
        hammer_calls: outcome.stats.hammer_calls,
        cost: outcome.stats.cost,
        premises: outcome.proof.as_deref().map(premises_of_proof),
        proof: outcome
            .proof
            .as_ref()
            .map(|steps| steps.iter().map(|s| s.canonical_string()).collect()),
    }
}

fn run_hammer(library: &TheoremLibrary, thm: &Theorem, budget: &HammerBudget) -> SystemResult {
    let root = ProofState::initial(&thm.statement);
    let outcome = hammer(library, &root.goals[0], budget);
    let step = outcome.to_step();
    if let Some(step) = &step {
        // Same re-check: the certificate must replay through the kernel.
        let closed = apply_step(library, &root, step)
            .unwrap_or_else(|e| panic!("hammer certificate for {} rejected by kernel: {e}", thm.name));
        assert!(is_proved(&closed), "hammer step left {} open", thm.name);
    }
    SystemResult {
        solved: outcome.proved(),
        status: match outcome.status {
            SaturationStatus::Proved => "proved",
            SaturationStatus::Saturated => "saturated",
            SaturationStatus::BudgetExhausted => "budget_exhausted",
        }
        .to_string(),
        queries: 0,
        hammer_calls: 1,
        cost: outcome.inferences_used.max(1),
        premises: step
            .as_ref()
            .map(|s| premises_of_proof(std::slice::from_ref(s))),
        proof: step.map(|s| vec![s.canonical_string()]),
    }
}

fn solved(result: &Option<SystemResult>) -> bool {
    result.as_ref().is_some_and(|r| r.solved)
}

fn compute_rates(matrix: &[TheoremOutcome], systems: SystemSet) -> Rates {
    let total = matrix.len();
    let count = |f: &dyn Fn(&TheoremOutcome) -> bool| matrix.iter().filter(|r| f(r)).count();
    let mut rates = Rates::default();
    if systems.policy_only {
        rates.policy_only = Some(RateLine::new(count(&|r| solved(&r.policy_only)), total));
    }
    if systems.hammer_only {
        rates.hammer_only = Some(RateLine::new(count(&|r| solved(&r.hammer_only)), total));
    }
    if systems.thor {
        rates.thor = Some(RateLine::new(count(&|r| solved(&r.thor)), total));
    }
    if systems.policy_only && systems.hammer_only {
        let union = count(&|r| solved(&r.policy_only) || solved(&r.hammer_only));
        rates.policy_union_hammer = Some(RateLine::new(union, total));
    }
    if systems.policy_only && systems.hammer_only && systems.thor {
        let exclusive = count(&|r| {
            solved(&r.thor) && !solved(&r.policy_only) && !solved(&r.hammer_only)
        });
        rates.thor_only = Some(RateLine::new(exclusive, total));
    }
    rates
}

fn found_histograms(matrix: &[TheoremOutcome], systems: SystemSet) -> BTreeMap<String, Histogram> {
    let mut out = BTreeMap::new();
    let mut collect = |name: &str, pick: &dyn Fn(&TheoremOutcome) -> &Option<SystemResult>| {
        let mut hist = Histogram::new();
        for row in matrix {
            if let Some(result) = pick(row) {
                if result.solved {
                    hist.add(result.premises.expect("solved result carries premises"));
                }
            }
        }
        out.insert(name.to_string(), hist);
    };
    if systems.policy_only {
        collect("policy_only", &|r| &r.policy_only);
    }
    if systems.hammer_only {
        collect("hammer_only", &|r| &r.hammer_only);
    }
    if systems.thor {
        collect("thor", &|r| &r.thor);
    }
    out
}

fn ground_truth_histograms(
    matrix: &[TheoremOutcome],
    test: &[&Theorem],
    systems: SystemSet,
) -> BTreeMap<String, Histogram> {
    let mut out = BTreeMap::new();
    let mut collect = |name: &str, pick: &dyn Fn(&TheoremOutcome) -> &Option<SystemResult>| {
        let mut hist = Histogram::new();
        for (row, thm) in matrix.iter().zip(test) {
            if solved(pick(row)) {
                hist.add(premises_of_proof(&thm.ground_truth_proof));
            }
        }
        out.insert(name.to_string(), hist);
    };
    if systems.policy_only {
        collect("policy_only", &|r| &r.policy_only);
    }
    if systems.hammer_only {
        collect("hammer_only", &|r| &r.hammer_only);
    }
    if systems.thor {
        collect("thor", &|r| &r.thor);
    }
    out
}

/// Pretty JSON with a trailing newline; byte-identical across reruns with the
/// same inputs and seed.
pub fn report_json(report: &EvalReport) -> String {
    let mut body = serde_json::to_string_pretty(report).expect("report serializes");
    body.push('\n');
    body
}

/// The headline success-rate table.
pub fn render_eval_table(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<24}{:>8}{:>8}{:>9}", "system", "solved", "total", "rate");
    let mut line = |name: &str, rate: &Option<RateLine>| {
        if let Some(r) = rate {
            let _ = writeln!(
                out,
                "{:<24}{:>8}{:>8}{:>8.1}%",
                name, r.solved, r.total, r.percent
            );
        }
    };
    line("policy only", &report.rates.policy_only);
    line("hammer only", &report.rates.hammer_only);
    line("policy + hammer union", &report.rates.policy_union_hammer);
    line("thor", &report.rates.thor);
    line("thor only", &report.rates.thor_only);
    out
}
