//! Retrieval-based proof-step policy: the desk-scale language-model stand-in.
//!
//! Training tokenizes every train-split prompt into an inverted index. A
//! query retrieves its K nearest train prompts by Jaccard similarity; each
//! distinct neighbor step is weighted by the summed similarity of the
//! neighbors proposing it (plus a smoothing constant), normalized into base
//! probabilities p. Sampling draws without replacement from q ∝ p^(1/T);
//! reported log-probabilities are always the untempered ln p, so search
//! priorities do not move with the temperature ablation.

use super::tokenize::tokenize;
use super::{Candidate, PolicyError, PolicyQuery, ProofPolicy, Suggestions};
use crate::corpus::datapoint::prompt_string;
use crate::corpus::split::SplitLabel;
use crate::corpus::Corpus;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

pub const DEFAULT_K_NEIGHBORS: usize = 32;
pub const DEFAULT_ALPHA: f64 = 0.05;

const MAGIC: &[u8; 10] = b"THORPOLICY";
const FILE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct TrainEntry {
    tokens: BTreeSet<String>,
    step: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalPolicyModel {
    /// Fingerprint of the corpus this was trained on.
    pub trained_on: String,
    pub use_context: bool,
    pub k_neighbors: usize,
    pub alpha: f64,
    entries: Vec<TrainEntry>,
    /// token -> ids of entries containing it, ascending.
    token_index: BTreeMap<String, Vec<u32>>,
    /// Distinct train steps by (count desc, step asc): the no-overlap
    /// fallback answer.
    step_frequencies: Vec<(String, usize)>,
}

/// Index statistics for the `policy inspect` verb.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexStats {
    pub trained_on: String,
    pub use_context: bool,
    pub k_neighbors: usize,
    pub alpha: f64,
    pub entries: usize,
    pub distinct_tokens: usize,
    pub distinct_steps: usize,
    pub hammer_fraction: f64,
    pub mean_tokens_per_entry: f64,
}

pub fn train(corpus: &Corpus, use_context: bool) -> Result<RetrievalPolicyModel, PolicyError> {
    train_with(
        corpus,
        use_context,
        DEFAULT_K_NEIGHBORS,
        DEFAULT_ALPHA,
    )
}

pub fn train_with(
    corpus: &Corpus,
    use_context: bool,
    k_neighbors: usize,
    alpha: f64,
) -> Result<RetrievalPolicyModel, PolicyError> {
    let train_points: Vec<_> = corpus.datapoints_in(SplitLabel::Train);
    if train_points.is_empty() {
        return Err(PolicyError::EmptyTrainSplit);
    }

    let mut entries = Vec::with_capacity(train_points.len());
    let mut token_index: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for dp in &train_points {
        let context = if use_context { dp.context.as_str() } else { "" };
        let tokens = tokenize(&prompt_string(context, &dp.state));
        let id = entries.len() as u32;
        for tok in &tokens {
            token_index.entry(tok.clone()).or_default().push(id);
        }
        *counts.entry(dp.step.clone()).or_default() += 1;
        entries.push(TrainEntry {
            tokens,
            step: dp.step.clone(),
        });
    }
    let mut step_frequencies: Vec<(String, usize)> = counts.into_iter().collect();
    step_frequencies.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    Ok(RetrievalPolicyModel {
        trained_on: corpus.fingerprint(),
        use_context,
        k_neighbors,
        alpha,
        entries,
        token_index,
        step_frequencies,
    })
}

impl RetrievalPolicyModel {
    /// The K nearest train entries by Jaccard similarity, ties broken by
    /// entry id; only entries sharing at least one token are neighbors.
    fn neighbors(&self, query_tokens: &BTreeSet<String>) -> Vec<(f64, u32)> {
        let mut overlap: BTreeMap<u32, usize> = BTreeMap::new();
        for tok in query_tokens {
            if let Some(ids) = self.token_index.get(tok) {
                for id in ids {
                    *overlap.entry(*id).or_default() += 1;
                }
            }
        }
        let mut sims: Vec<(f64, u32)> = overlap
            .into_iter()
            .map(|(id, shared)| {
                let entry = &self.entries[id as usize];
                let union = query_tokens.len() + entry.tokens.len() - shared;
                (shared as f64 / union as f64, id)
            })
            .collect();
        sims.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(&b.1)));
        sims.truncate(self.k_neighbors);
        sims
    }

    fn query_tokens(&self, query: &PolicyQuery) -> BTreeSet<String> {
        let context = if self.use_context {
            query.context.as_str()
        } else {
            ""
        };
        tokenize(&prompt_string(context, &query.proof_state))
    }

    /// Base and tempered distributions for a query: (step, p, q) in
    /// lexicographic step order. Empty when the query has no neighbors.
    pub fn candidate_distribution(
        &self,
        query: &PolicyQuery,
        temperature: f64,
    ) -> Result<Vec<(String, f64, f64)>, PolicyError> {
        if temperature <= 0.0 {
            return Err(PolicyError::BadTemperature(temperature));
        }
        if self.entries.is_empty() {
            return Err(PolicyError::UntrainedModel);
        }
        let neighbors = self.neighbors(&self.query_tokens(query));
        let mut weights: BTreeMap<&str, f64> = BTreeMap::new();
        for (sim, id) in &neighbors {
            *weights
                .entry(self.entries[*id as usize].step.as_str())
                .or_default() += sim;
        }
        let total: f64 = weights.values().sum::<f64>() + self.alpha * weights.len() as f64;
        let ps: Vec<(String, f64)> = weights
            .into_iter()
            .map(|(step, w)| (step.to_string(), (w + self.alpha) / total))
            .collect();
        // q ∝ p^(1/T), computed in log space against the maximum.
        let lmax = ps
            .iter()
            .map(|(_, p)| p.ln())
            .fold(f64::NEG_INFINITY, f64::max);
        let unnorm: Vec<f64> = ps
            .iter()
            .map(|(_, p)| ((p.ln() - lmax) / temperature).exp())
            .collect();
        let z: f64 = unnorm.iter().sum();
        Ok(ps
            .into_iter()
            .zip(unnorm)
            .map(|((step, p), u)| (step, p, u / z))
            .collect())
    }

    /// Stable content hash of the trained model.
    pub fn fingerprint(&self) -> String {
        let payload = serde_json::to_vec(self).expect("model is serializable");
        let digest = Sha256::digest(&payload);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn stats(&self) -> IndexStats {
        let hammer = self
            .entries
            .iter()
            .filter(|e| e.step == crate::corpus::datapoint::HAMMER_TOKEN)
            .count();
        let token_total: usize = self.entries.iter().map(|e| e.tokens.len()).sum();
        IndexStats {
            trained_on: self.trained_on.clone(),
            use_context: self.use_context,
            k_neighbors: self.k_neighbors,
            alpha: self.alpha,
            entries: self.entries.len(),
            distinct_tokens: self.token_index.len(),
            distinct_steps: self.step_frequencies.len(),
            hammer_fraction: hammer as f64 / self.entries.len().max(1) as f64,
            mean_tokens_per_entry: token_total as f64 / self.entries.len().max(1) as f64,
        }
    }

    /// Single-file binary persistence: magic, version, JSON payload.
    pub fn save(&self, path: &Path) -> Result<(), PolicyError> {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&FILE_VERSION.to_le_bytes());
        bytes.extend_from_slice(&serde_json::to_vec(self).expect("model is serializable"));
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, &bytes).map_err(|e| PolicyError::Io(e.to_string()))?;
        std::fs::rename(&tmp, path).map_err(|e| PolicyError::Io(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RetrievalPolicyModel, PolicyError> {
        let bytes = std::fs::read(path).map_err(|e| PolicyError::Io(e.to_string()))?;
        if bytes.len() < MAGIC.len() + 4 || &bytes[..MAGIC.len()] != MAGIC {
            return Err(PolicyError::BadMagic);
        }
        let mut version = [0u8; 4];
        version.copy_from_slice(&bytes[MAGIC.len()..MAGIC.len() + 4]);
        let version = u32::from_le_bytes(version);
        if version != FILE_VERSION {
            return Err(PolicyError::BadVersion(version));
        }
        serde_json::from_slice(&bytes[MAGIC.len() + 4..])
            .map_err(|e| PolicyError::CorruptPayload(e.to_string()))
    }

    fn fallback(&self, n: usize) -> Suggestions {
        let total = self.entries.len() as f64;
        let candidates: Vec<Candidate> = self
            .step_frequencies
            .iter()
            .take(n)
            .map(|(step, count)| Candidate {
                step_text: step.clone(),
                log_prob: (*count as f64 / total).ln(),
            })
            .collect();
        // Fallback answers are deterministic and temperature-free, so
        // their support is just the answered steps.
        let mut support: Vec<String> = candidates.iter().map(|c| c.step_text.clone()).collect();
        support.sort();
        Suggestions {
            candidates,
            support,
            fallback: true,
        }
    }
}

impl ProofPolicy for RetrievalPolicyModel {
    fn suggest(
        &self,
        query: &PolicyQuery,
        n: usize,
        temperature: f64,
        rng_seed: u64,
    ) -> Result<Suggestions, PolicyError> {
        if n == 0 {
            return Err(PolicyError::ZeroSamples);
        }
        let distribution = self.candidate_distribution(query, temperature)?;
        if distribution.is_empty() {
            return Ok(self.fallback(n));
        }

        // Draw without replacement from q, renormalizing after each draw.
        // Log-space tempering keeps temperature=1e-6 an exact argmax with
        // lexicographic tie-break (the base order is lexicographic).
        let mut remaining: Vec<(String, f64)> =
            distribution.into_iter().map(|(s, p, _)| (s, p)).collect();
        // Distribution keys are distinct and lexicographic already.
        let support: Vec<String> = remaining.iter().map(|(s, _)| s.clone()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut candidates = Vec::new();
        while !remaining.is_empty() && candidates.len() < n {
            let lmax = remaining
                .iter()
                .map(|(_, p)| p.ln())
                .fold(f64::NEG_INFINITY, f64::max);
            let qs: Vec<f64> = remaining
                .iter()
                .map(|(_, p)| ((p.ln() - lmax) / temperature).exp())
                .collect();
            let z: f64 = qs.iter().sum();
            let mut u = rng.gen::<f64>() * z;
            let mut pick = remaining.len() - 1;
            for (i, q) in qs.iter().enumerate() {
                if u < *q {
                    pick = i;
                    break;
                }
                u -= q;
            }
            let (step_text, p) = remaining.remove(pick);
            candidates.push(Candidate {
                step_text,
                log_prob: p.ln(),
            });
        }
        Ok(Suggestions {
            candidates,
            support,
            fallback: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::datapoint::{Datapoint, HAMMER_TOKEN};
    use crate::corpus::split::SplitInfo;
    use crate::logic::goal::TheoremLibrary;
    use crate::logic::model::FiniteModel;
    use crate::logic::term::Signature;

    fn dp(theorem: &str, context: &str, state: &str, step: &str) -> Datapoint {
        Datapoint {
            theorem: theorem.into(),
            context: context.into(),
            state: state.into(),
            step: step.into(),
            hammer_solvable: None,
        }
    }

    fn corpus_of(datapoints: Vec<Datapoint>) -> Corpus {
        let names: BTreeSet<String> = datapoints.iter().map(|d| d.theorem.clone()).collect();
        Corpus {
            library: TheoremLibrary::new(Signature::default()),
            theorems: Vec::new(),
            datapoints,
            split: SplitInfo::all_train(names),
            model: FiniteModel {
                domain_size: 1,
                predicates: BTreeMap::new(),
                functions: BTreeMap::new(),
            },
        }
    }

    fn query(context: &str, state: &str) -> PolicyQuery {
        PolicyQuery {
            context: context.into(),
            proof_state: state.into(),
        }
    }

    #[test]
    fn one_datapoint_corpus_retrieves_itself() {
        let corpus = corpus_of(vec![dp("a", "", "|- p -> p", "intro")]);
        let model = train(&corpus, true).unwrap();
        let dist = model
            .candidate_distribution(&query("", "|- p -> p"), 1.0)
            .unwrap();
        // Sole neighbor at similarity 1.0: p = (1 + α)/(1 + α) = 1.
        assert_eq!(dist.len(), 1);
        assert_eq!(dist[0].0, "intro");
        assert!((dist[0].1 - 1.0).abs() < 1e-12);
        let got = model.suggest(&query("", "|- p -> p"), 4, 1.0, 7).unwrap();
        assert!(!got.fallback);
        assert_eq!(got.candidates.len(), 1);
        assert_eq!(got.candidates[0].step_text, "intro");
        assert!((got.candidates[0].log_prob - 0.0).abs() < 1e-12);
    }

    #[test]
    fn training_twice_yields_identical_fingerprints() {
        let corpus = corpus_of(vec![
            dp("a", "", "|- p -> p", "intro"),
            dp("a", "intro", "h0 : p |- p", "assumption"),
        ]);
        let m1 = train(&corpus, true).unwrap();
        let m2 = train(&corpus, true).unwrap();
        assert_eq!(m1.fingerprint(), m2.fingerprint());
        let m3 = train(&corpus, false).unwrap();
        assert_ne!(m1.fingerprint(), m3.fingerprint());
    }

    #[test]
    fn empty_train_split_is_an_error() {
        let corpus = corpus_of(vec![]);
        assert_eq!(train(&corpus, true).unwrap_err(), PolicyError::EmptyTrainSplit);
    }

    #[test]
    fn hammer_replaced_neighbors_dominate() {
        // Two hammer-replaced neighbors close to the query, one tactic
        // neighbor further away. Token sets (markers dropped):
        //   e1: {|-, s, (, ), a}     step <hammer>
        //   e2: {|-, s, (, ), b}     step <hammer>
        //   e3: {|-, r, (, ), c, &, d}  step intro
        //   query: {|-, s, (, ), e}
        // sims: e1 = e2 = 4/6, e3 = 3/9. Weights with α = 0.05:
        //   <hammer> = 8/6 + 0.05, intro = 1/3 + 0.05; p(<hammer>) ≈ 0.783.
        let corpus = corpus_of(vec![
            dp("a", "", "|- s(a)", HAMMER_TOKEN),
            dp("b", "", "|- s(b)", HAMMER_TOKEN),
            dp("c", "", "|- r(c) & r(d)", "intro"),
        ]);
        let model = train(&corpus, true).unwrap();
        let dist = model
            .candidate_distribution(&query("", "|- s(e)"), 1.0)
            .unwrap();
        let p: BTreeMap<&str, f64> = dist.iter().map(|(s, p, _)| (s.as_str(), *p)).collect();
        let w_hammer = 8.0 / 6.0 + 0.05;
        let w_intro = 1.0 / 3.0 + 0.05;
        let z = w_hammer + w_intro;
        assert!((p[HAMMER_TOKEN] - w_hammer / z).abs() < 1e-12);
        assert!((p["intro"] - w_intro / z).abs() < 1e-12);
        // And the argmax proposal is the hammer.
        let got = model.suggest(&query("", "|- s(e)"), 1, 1e-6, 0).unwrap();
        assert_eq!(got.candidates[0].step_text, HAMMER_TOKEN);
    }

    fn ab_corpus() -> Corpus {
        // Unequal weights: "left" proposed by two closer neighbors.
        corpus_of(vec![
            dp("a", "", "|- p(a) | q(a)", "left"),
            dp("b", "", "|- p(b) | q(b)", "left"),
            dp("c", "", "|- p(c) & q(c)", "split"),
        ])
    }

    #[test]
    fn tiny_temperature_is_argmax_first() {
        let model = train(&ab_corpus(), true).unwrap();
        let q = query("", "|- p(x) | q(x)");
        for seed in 0..20 {
            let got = model.suggest(&q, 2, 1e-6, seed).unwrap();
            assert_eq!(got.candidates[0].step_text, "left");
        }
    }

    #[test]
    fn n_exceeding_distinct_returns_all() {
        let model = train(&ab_corpus(), true).unwrap();
        let got = model.suggest(&query("", "|- p(x) | q(x)"), 64, 1.2, 3).unwrap();
        let steps: BTreeSet<&str> = got.candidates.iter().map(|c| c.step_text.as_str()).collect();
        assert_eq!(steps, BTreeSet::from(["left", "split"]));
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let model = train(&ab_corpus(), true).unwrap();
        let q = query("", "|- p(x) | q(x)");
        let a = model.suggest(&q, 2, 1.2, 42).unwrap();
        let b = model.suggest(&q, 2, 1.2, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn probabilities_sum_to_one_and_logs_are_nonpositive() {
        let model = train(&ab_corpus(), true).unwrap();
        let dist = model
            .candidate_distribution(&query("", "|- p(x) | q(x)"), 1.2)
            .unwrap();
        let p_sum: f64 = dist.iter().map(|(_, p, _)| p).sum();
        let q_sum: f64 = dist.iter().map(|(_, _, q)| q).sum();
        assert!((p_sum - 1.0).abs() < 1e-9);
        assert!((q_sum - 1.0).abs() < 1e-9);
        let got = model.suggest(&query("", "|- p(x) | q(x)"), 8, 1.2, 0).unwrap();
        assert!(got.candidates.iter().all(|c| c.log_prob <= 0.0));
        assert!(got.candidates.iter().all(|c| c.is_well_formed()));
    }

    #[test]
    fn entropy_is_nondecreasing_in_temperature() {
        let model = train(&ab_corpus(), true).unwrap();
        let q = query("", "|- p(x) | q(x)");
        let entropy = |t: f64| -> f64 {
            model
                .candidate_distribution(&q, t)
                .unwrap()
                .iter()
                .map(|(_, _, q)| if *q > 0.0 { -q * q.ln() } else { 0.0 })
                .sum()
        };
        let (e1, e2, e3) = (entropy(0.5), entropy(1.0), entropy(2.0));
        assert!(e1 <= e2 + 1e-12);
        assert!(e2 <= e3 + 1e-12);
    }

    #[test]
    fn no_context_model_ignores_context() {
        let corpus = corpus_of(vec![
            dp("a", "intro", "|- p(a) | q(a)", "left"),
            dp("b", "split", "|- p(b) & q(b)", "split"),
        ]);
        let model = train(&corpus, false).unwrap();
        let a = model.suggest(&query("intro", "|- p(x) | q(x)"), 2, 1.0, 9).unwrap();
        let b = model.suggest(&query("cases h0", "|- p(x) | q(x)"), 2, 1.0, 9).unwrap();
        assert_eq!(a, b);
        // A context-aware model does distinguish them.
        let model = train(&corpus, true).unwrap();
        let a = model
            .candidate_distribution(&query("intro", "|- p(x) | q(x)"), 1.0)
            .unwrap();
        let b = model
            .candidate_distribution(&query("split", "|- p(x) | q(x)"), 1.0)
            .unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn zero_overlap_falls_back_to_global_frequencies() {
        let corpus = corpus_of(vec![
            dp("a", "", "|- p(a)", "assumption"),
            dp("b", "", "|- p(b)", "assumption"),
            dp("c", "", "|- p(c) & p(d)", "split"),
        ]);
        let model = train(&corpus, true).unwrap();
        let got = model.suggest(&query("", "zzz"), 2, 1.0, 0).unwrap();
        assert!(got.fallback);
        assert_eq!(got.candidates[0].step_text, "assumption");
        assert!((got.candidates[0].log_prob - (2.0f64 / 3.0).ln()).abs() < 1e-12);
        assert_eq!(got.candidates[1].step_text, "split");
    }

    #[test]
    fn save_load_round_trip() {
        let model = train(&ab_corpus(), true).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        model.save(&path).unwrap();
        let loaded = RetrievalPolicyModel::load(&path).unwrap();
        assert_eq!(model, loaded);
        assert_eq!(model.fingerprint(), loaded.fingerprint());

        std::fs::write(&path, b"garbage file").unwrap();
        assert_eq!(
            RetrievalPolicyModel::load(&path).unwrap_err(),
            PolicyError::BadMagic
        );
        let mut bytes = Vec::new();
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&99u32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        assert_eq!(
            RetrievalPolicyModel::load(&path).unwrap_err(),
            PolicyError::BadVersion(99)
        );
    }

    #[test]
    fn stats_summarize_the_index() {
        let corpus = corpus_of(vec![
            dp("a", "", "|- s(a)", HAMMER_TOKEN),
            dp("b", "", "|- s(b)", "intro"),
        ]);
        let model = train(&corpus, true).unwrap();
        let stats = model.stats();
        assert_eq!(stats.entries, 2);
        assert_eq!(stats.distinct_steps, 2);
        assert!((stats.hammer_fraction - 0.5).abs() < 1e-12);
        assert_eq!(stats.trained_on, corpus.fingerprint());
    }
}
