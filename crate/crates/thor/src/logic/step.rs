//! Proof steps: the tactic language the kernel checks and the policy emits.

use crate::hammer::certificate::Certificate;
use crate::logic::term::Term;
use std::sync::Arc;

/// A certificate reference inside a `by_cert` step. The premise list is part
/// of the step's identity (it is printed and parsed); the resolved
/// certificate payload is a cache and is ignored by equality.
#[derive(Clone, Debug)]
pub struct CertStep {
    pub cert_id: String,
    pub premises: Vec<String>,
    pub certificate: Option<Arc<Certificate>>,
}

impl PartialEq for CertStep {
    fn eq(&self, other: &Self) -> bool {
        self.cert_id == other.cert_id && self.premises == other.premises
    }
}

impl Eq for CertStep {}

impl CertStep {
    pub fn new(cert_id: impl Into<String>, premises: Vec<String>) -> CertStep {
        CertStep {
            cert_id: cert_id.into(),
            premises,
            certificate: None,
        }
    }

    pub fn with_certificate(mut self, cert: Arc<Certificate>) -> CertStep {
        self.certificate = Some(cert);
        self
    }
}

/// One tactic application. `HammerToken` is the policy-facing `<hammer>`
/// action; the kernel itself rejects it (the search must resolve it to a
/// certificate first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofStep {
    Intro,
    Split,
    Left,
    Right,
    ExistsWitness(Term),
    Assumption,
    Destruct(String),
    Cases(String),
    Apply(String),
    ByCertificate(CertStep),
    HammerToken,
}

impl ProofStep {
    /// Canonical text; inverse of `parse_step`.
    pub fn canonical_string(&self) -> String {
        self.to_string()
    }

    /// Library facts this step cites (premise-count bookkeeping).
    pub fn cited_premises(&self) -> Vec<String> {
        match self {
            ProofStep::Apply(name) => vec![name.clone()],
            ProofStep::ByCertificate(c) => c.premises.clone(),
            _ => Vec::new(),
        }
    }
}
