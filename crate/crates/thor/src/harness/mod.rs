//! The experiment harness: configuration, evaluation over the test split,
//! ablations, premise histograms, and run manifests.

pub mod ablate;
pub mod config_file;
pub mod eval;
pub mod histogram;
pub mod manifest;
pub mod metrics;
#[cfg(test)]
pub(crate) mod testkit;

pub use ablate::{compare_supports, run_ablations, support_index, AblateError, AblationSet};
pub use config_file::{parse_config, ConfigError, RunConfig};
pub use eval::{
    render_eval_table, report_json, run_eval, EvalError, EvalInputs, EvalReport, EvalRun,
    ModelEcho, RateLine, Rates, SystemResult, SystemSet, TheoremOutcome, TraceMap,
};
pub use histogram::{
    premises_of_proof, render_histogram_csv, render_histogram_table, Histogram,
};
pub use manifest::{write_atomic, RunManifest, MANIFEST_FILE};
pub use metrics::{premise_step_success_metric, PremiseStepMetric};

/// Percent with one decimal: the report-wide rate convention.
pub(crate) fn percent(numerator: usize, denominator: usize) -> f64 {
    (numerator as f64 / denominator as f64 * 1000.0).round() / 10.0
}

#[cfg(test)]
mod tests {
    #[test]
    fn percent_rounds_to_one_decimal() {
        assert_eq!(super::percent(66, 210), 31.4);
        assert_eq!(super::percent(1, 3), 33.3);
        assert_eq!(super::percent(2, 3), 66.7);
        assert_eq!(super::percent(0, 7), 0.0);
        assert_eq!(super::percent(7, 7), 100.0);
    }
}
