//! Shared fixtures for harness tests: a split tiny corpus, its preprocessed
//! twin, and models trained on each.

use super::config_file::RunConfig;
use super::eval::EvalInputs;
use crate::corpus::generate::shared_tiny_corpus;
use crate::corpus::{split_corpus, Corpus};
use crate::hammer::run::HammerBudget;
use crate::policy::retrieval::{train, RetrievalPolicyModel};
use crate::search::{preprocess_corpus, SearchConfig};
use std::sync::OnceLock;

pub(crate) struct Fixture {
    pub raw: Corpus,
    pub prep: Corpus,
    pub raw_model: RetrievalPolicyModel,
    pub prep_model: RetrievalPolicyModel,
}

/// Search knobs scaled to the tiny corpus: its composite roots resist the
/// hammer below 3k inferences, and plants stay well under that.
pub(crate) fn tiny_eval_config() -> RunConfig {
    RunConfig {
        search: SearchConfig {
            queue_cap: 16,
            max_queries: 40,
            samples_per_expansion: 4,
            temperature: 1.2,
            step_budget: 3_000,
            total_budget: 20_000,
            hammer_budget: HammerBudget {
                max_selected_premises: 64,
                max_inferences: 3_000,
                wallclock_secs: None,
            },
            step_wallclock_secs: None,
            total_wallclock_secs: None,
        },
        n_theories: 3,
        theorems_per_theory: 6,
        train_fraction: 0.5,
        valid_fraction: 0.1,
        test_fraction: 0.4,
        use_trace_shortcut: true,
        use_context: true,
        hammer_only_scale: 4,
    }
}

pub(crate) fn fixture() -> &'static Fixture {
    static FIXTURE: OnceLock<Fixture> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let config = tiny_eval_config();
        let raw = split_corpus(shared_tiny_corpus().clone(), config.fractions(), 5).unwrap();
        let (prep, _) = preprocess_corpus(&raw, &config.preprocess_budget(), true).unwrap();
        let raw_model = train(&raw, true).unwrap();
        let prep_model = train(&prep, true).unwrap();
        Fixture {
            raw,
            prep,
            raw_model,
            prep_model,
        }
    })
}

pub(crate) fn inputs(f: &Fixture) -> EvalInputs<'_> {
    EvalInputs {
        corpus: &f.raw,
        preprocessed: Some(&f.prep),
        raw_model: Some(&f.raw_model),
        preprocessed_model: Some(&f.prep_model),
    }
}
