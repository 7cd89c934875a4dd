//! A deterministic scripted policy: the test double for the search layer.

use super::{Candidate, PolicyError, PolicyQuery, ProofPolicy, Suggestions};
use std::collections::BTreeMap;

/// Maps proof states to fixed step lists. Exact entries win over prefix
/// entries; among prefixes the longest match wins. Unmatched states get an
/// empty suggestion batch.
#[derive(Clone, Debug, Default)]
pub struct ScriptedPolicy {
    exact: BTreeMap<String, Vec<String>>,
    prefixes: Vec<(String, Vec<String>)>,
}

impl ScriptedPolicy {
    pub fn new() -> ScriptedPolicy {
        ScriptedPolicy::default()
    }

    pub fn exact(mut self, state: impl Into<String>, steps: &[&str]) -> ScriptedPolicy {
        self.exact
            .insert(state.into(), steps.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn prefix(mut self, pattern: impl Into<String>, steps: &[&str]) -> ScriptedPolicy {
        self.prefixes
            .push((pattern.into(), steps.iter().map(|s| s.to_string()).collect()));
        self
    }

    fn lookup(&self, state: &str) -> Option<&[String]> {
        if let Some(steps) = self.exact.get(state) {
            return Some(steps);
        }
        self.prefixes
            .iter()
            .filter(|(pat, _)| state.starts_with(pat.as_str()))
            .max_by_key(|(pat, _)| pat.len())
            .map(|(_, steps)| steps.as_slice())
    }
}

impl ProofPolicy for ScriptedPolicy {
    fn suggest(
        &self,
        query: &PolicyQuery,
        n: usize,
        _temperature: f64,
        _rng_seed: u64,
    ) -> Result<Suggestions, PolicyError> {
        if n == 0 {
            return Err(PolicyError::ZeroSamples);
        }
        let steps = match self.lookup(&query.proof_state) {
            None => return Ok(Suggestions::default()),
            Some(steps) => steps,
        };
        let uniform = (1.0 / steps.len().max(1) as f64).ln();
        let mut support: Vec<String> = steps.to_vec();
        support.sort();
        support.dedup();
        Ok(Suggestions {
            candidates: steps
                .iter()
                .take(n)
                .map(|s| Candidate {
                    step_text: s.clone(),
                    log_prob: uniform,
                })
                .collect(),
            support,
            fallback: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(state: &str) -> PolicyQuery {
        PolicyQuery {
            context: String::new(),
            proof_state: state.into(),
        }
    }

    #[test]
    fn exact_entries_answer_their_state() {
        let policy = ScriptedPolicy::new().exact("|- p -> p", &["intro"]);
        let got = policy.suggest(&q("|- p -> p"), 4, 1.0, 0).unwrap();
        assert_eq!(got.candidates.len(), 1);
        assert_eq!(got.candidates[0].step_text, "intro");
        assert_eq!(got.candidates[0].log_prob, 0.0);
    }

    #[test]
    fn unmatched_states_get_an_empty_batch() {
        let policy = ScriptedPolicy::new().exact("|- p -> p", &["intro"]);
        let got = policy.suggest(&q("|- q"), 4, 1.0, 0).unwrap();
        assert!(got.candidates.is_empty());
        assert!(!got.fallback);
    }

    #[test]
    fn longest_prefix_wins_but_exact_wins_over_prefixes() {
        let policy = ScriptedPolicy::new()
            .prefix("h0", &["assumption"])
            .prefix("h0 : p", &["apply ax"])
            .exact("h0 : p |- q", &["destruct h0"]);
        assert_eq!(
            policy.suggest(&q("h0 : r |- r"), 1, 1.0, 0).unwrap().candidates[0].step_text,
            "assumption"
        );
        assert_eq!(
            policy.suggest(&q("h0 : p |- r"), 1, 1.0, 0).unwrap().candidates[0].step_text,
            "apply ax"
        );
        assert_eq!(
            policy.suggest(&q("h0 : p |- q"), 1, 1.0, 0).unwrap().candidates[0].step_text,
            "destruct h0"
        );
    }

    #[test]
    fn uniform_log_probs_and_truncation() {
        let policy = ScriptedPolicy::new().exact("|- g", &["split", "left", "right", "intro"]);
        let got = policy.suggest(&q("|- g"), 2, 1.0, 0).unwrap();
        assert_eq!(got.candidates.len(), 2);
        for c in &got.candidates {
            assert!((c.log_prob - (0.25f64).ln()).abs() < 1e-12);
        }
    }
}
