//! The synthetic corpus: generation, splitting, datapoints, storage.

pub mod datapoint;
pub mod generate;
pub mod split;
pub mod store;

use crate::hammer::certificate::Certificate;
use crate::logic::goal::{Theorem, TheoremLibrary};
use crate::logic::model::FiniteModel;
use crate::logic::step::ProofStep;
use datapoint::Datapoint;
use sha2::{Digest, Sha256};
use split::{SplitInfo, SplitLabel};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Certificates from ground-truth proofs, keyed by id. Searches resolve
/// policy-emitted `by_cert` steps against this store.
pub type CertStore = BTreeMap<String, Arc<Certificate>>;

/// Everything one experiment consumes: a fact library, theorems with
/// ground-truth proofs, their replay datapoints, the split, and the finite
/// model every fact is true in.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub library: TheoremLibrary,
    pub theorems: Vec<Theorem>,
    pub datapoints: Vec<Datapoint>,
    pub split: SplitInfo,
    pub model: FiniteModel,
}

impl Corpus {
    pub fn theorem(&self, name: &str) -> Option<&Theorem> {
        self.theorems.iter().find(|t| t.name == name)
    }

    pub fn theorems_in(&self, label: SplitLabel) -> Vec<&Theorem> {
        self.theorems
            .iter()
            .filter(|t| self.split.assignment.get(&t.name) == Some(&label))
            .collect()
    }

    pub fn datapoints_in(&self, label: SplitLabel) -> Vec<&Datapoint> {
        self.datapoints
            .iter()
            .filter(|d| self.split.assignment.get(&d.theorem) == Some(&label))
            .collect()
    }

    /// All inline certificate payloads, keyed by id.
    pub fn cert_store(&self) -> CertStore {
        let mut store = CertStore::new();
        for t in &self.theorems {
            for step in &t.ground_truth_proof {
                if let ProofStep::ByCertificate(cs) = step {
                    if let Some(cert) = &cs.certificate {
                        store.insert(cert.id.clone(), cert.clone());
                    }
                }
            }
        }
        store
    }

    /// Content hash over every canonical serialization; models trained on a
    /// corpus embed this and evaluation refuses mismatches.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"corpus-v1\n");
        for (name, fact) in self.library.iter() {
            h.update(name.as_bytes());
            h.update(b" : ");
            h.update(fact.to_string().as_bytes());
            h.update(b"\n");
        }
        for t in &self.theorems {
            h.update(t.name.as_bytes());
            h.update(b" : ");
            h.update(t.statement.to_string().as_bytes());
            for s in &t.ground_truth_proof {
                h.update(b" ; ");
                h.update(s.canonical_string().as_bytes());
            }
            h.update(b"\n");
        }
        for d in &self.datapoints {
            h.update(datapoint::serialize_datapoint(d).as_bytes());
            h.update(b"\n");
        }
        h.update(serde_json::to_string(&self.split).unwrap().as_bytes());
        h.update(serde_json::to_string(&self.model).unwrap().as_bytes());
        let digest = h.finalize();
        let mut out = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    /// Re-label the split in place (used by `split_corpus`).
    pub fn with_split(mut self, split: SplitInfo) -> Corpus {
        self.split = split;
        self
    }
}

/// Re-split a corpus: same contents, fresh assignment.
pub fn split_corpus(
    corpus: Corpus,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<Corpus, split::SplitError> {
    let names: Vec<String> = corpus.theorems.iter().map(|t| t.name.clone()).collect();
    let info = split::assign_split(&names, fractions, seed)?;
    Ok(corpus.with_split(info))
}
