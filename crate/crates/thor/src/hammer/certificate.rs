//! Resolution certificates: self-contained refutation transcripts.
//!
//! A certificate lists the input clauses it consumed (with their origins)
//! and a sequence of inferences, each carrying its fully resolved unifier.
//! Replay is pure bookkeeping — no search, no unification algorithm — so a
//! checker can verify a proof found by the saturation loop without trusting
//! it. Inference indices address the combined sequence: inputs first, then
//! each inference's conclusion.

use super::clause::{Clause, ClauseOrigin, Literal};
use crate::logic::subst::Subst;
use crate::logic::term::Term;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("input {index} ({origin:?}) not present in the problem")]
    UnknownInput { index: usize, origin: ClauseOrigin },
    #[error("inference {index} references clause {referenced} before it exists")]
    ForwardReference { index: usize, referenced: usize },
    #[error("inference {index} selects a literal out of range")]
    LiteralOutOfRange { index: usize },
    #[error("inference {index} resolves literals that are not complementary")]
    NotComplementary { index: usize },
    #[error("inference {index}: recorded substitution does not unify the selected literals")]
    SubstitutionMismatch { index: usize },
    #[error("inference {index}: factoring needs at least two distinct literals")]
    DegenerateFactor { index: usize },
    #[error("certificate does not end in the empty clause")]
    NoEmptyClause,
    #[error("certificate id mismatch: declared {declared}, computed {computed}")]
    IdMismatch { declared: String, computed: String },
}

/// An input clause as the certificate saw it: canonical literals plus origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertInput {
    pub origin: ClauseOrigin,
    pub literals: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertRule {
    /// Binary resolution: `left`'s literal `left_lit` against `right`'s
    /// literal `right_lit`. Parents are standardized apart first: the left
    /// parent's `X<k>` become `L<k>`, the right's become `R<k>`.
    Resolve {
        left: usize,
        left_lit: usize,
        right: usize,
        right_lit: usize,
    },
    /// Positive/negative factoring: collapse `lit_indices` of `parent`
    /// (same predicate and polarity) into one literal.
    Factor { parent: usize, lit_indices: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertInference {
    pub rule: CertRule,
    /// Fully resolved unifier over the standardized-apart variables, sorted
    /// by variable name.
    pub subst: Vec<(String, Term)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub id: String,
    pub inputs: Vec<CertInput>,
    pub inferences: Vec<CertInference>,
}

/// Serialization view used for the content hash (everything but the id).
#[derive(Serialize)]
struct CertBody<'a> {
    inputs: &'a [CertInput],
    inferences: &'a [CertInference],
}

impl Certificate {
    /// Build a certificate, deriving its content-addressed id.
    pub fn assemble(inputs: Vec<CertInput>, inferences: Vec<CertInference>) -> Certificate {
        let id = Self::compute_id(&inputs, &inferences);
        Certificate {
            id,
            inputs,
            inferences,
        }
    }

    pub fn compute_id(inputs: &[CertInput], inferences: &[CertInference]) -> String {
        let body = CertBody { inputs, inferences };
        let json = serde_json::to_string(&body).expect("certificate body serializes");
        let digest = Sha256::digest(json.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        format!("c{}", &hex[..12])
    }

    /// Verify this certificate refutes `problem`: every input appears in the
    /// problem (same canonical literals and origin), every inference is a
    /// correct rule application under its recorded unifier, and the last
    /// conclusion is the empty clause.
    pub fn replay(&self, problem: &[Clause]) -> Result<(), CertificateError> {
        let computed = Self::compute_id(&self.inputs, &self.inferences);
        if computed != self.id {
            return Err(CertificateError::IdMismatch {
                declared: self.id.clone(),
                computed,
            });
        }
        let mut seq: Vec<Clause> = Vec::with_capacity(self.inputs.len() + self.inferences.len());
        for (index, input) in self.inputs.iter().enumerate() {
            let found = problem
                .iter()
                .any(|c| c.origin == input.origin && c.literals == input.literals);
            if !found {
                return Err(CertificateError::UnknownInput {
                    index,
                    origin: input.origin.clone(),
                });
            }
            seq.push(Clause {
                literals: input.literals.clone(),
                origin: input.origin.clone(),
            });
        }
        for (i, inf) in self.inferences.iter().enumerate() {
            let index = self.inputs.len() + i;
            let conclusion = apply_inference(&seq, index, inf)?;
            seq.push(conclusion);
        }
        match seq.last() {
            Some(c) if c.is_empty() => Ok(()),
            _ => Err(CertificateError::NoEmptyClause),
        }
    }
}

fn fetch(seq: &[Clause], at: usize, index: usize) -> Result<&Clause, CertificateError> {
    if index >= at {
        return Err(CertificateError::ForwardReference {
            index: at,
            referenced: index,
        });
    }
    Ok(&seq[index])
}

/// Recompute one inference's conclusion, validating the recorded unifier.
pub(super) fn apply_inference(
    seq: &[Clause],
    index: usize,
    inf: &CertInference,
) -> Result<Clause, CertificateError> {
    let subst = Subst::from_resolved(&inf.subst);
    match &inf.rule {
        CertRule::Resolve {
            left,
            left_lit,
            right,
            right_lit,
        } => {
            let lc = fetch(seq, index, *left)?;
            let rc = fetch(seq, index, *right)?;
            let lls = lc.rename_vars(|k| format!("L{k}"));
            let rls = rc.rename_vars(|k| format!("R{k}"));
            let (Some(ll), Some(rl)) = (lls.get(*left_lit), rls.get(*right_lit)) else {
                return Err(CertificateError::LiteralOutOfRange { index });
            };
            if ll.positive == rl.positive || ll.predicate != rl.predicate {
                return Err(CertificateError::NotComplementary { index });
            }
            let la = ll.apply(&subst);
            let ra = rl.apply(&subst);
            if la.args != ra.args {
                return Err(CertificateError::SubstitutionMismatch { index });
            }
            let literals: Vec<Literal> = lls
                .iter()
                .enumerate()
                .filter(|(k, _)| k != left_lit)
                .map(|(_, l)| l.apply(&subst))
                .chain(
                    rls.iter()
                        .enumerate()
                        .filter(|(k, _)| k != right_lit)
                        .map(|(_, l)| l.apply(&subst)),
                )
                .collect();
            Ok(Clause::new(literals, ClauseOrigin::Derived))
        }
        CertRule::Factor {
            parent,
            lit_indices,
        } => {
            let pc = fetch(seq, index, *parent)?;
            let mut distinct = lit_indices.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 2 {
                return Err(CertificateError::DegenerateFactor { index });
            }
            let lits: Vec<&Literal> = distinct
                .iter()
                .map(|&k| pc.literals.get(k))
                .collect::<Option<Vec<_>>>()
                .ok_or(CertificateError::LiteralOutOfRange { index })?;
            let first = lits[0];
            if !lits.iter().all(|l| l.same_shape(first)) {
                return Err(CertificateError::NotComplementary { index });
            }
            let unified = first.apply(&subst);
            if !lits.iter().all(|l| l.apply(&subst).args == unified.args) {
                return Err(CertificateError::SubstitutionMismatch { index });
            }
            let literals: Vec<Literal> =
                pc.literals.iter().map(|l| l.apply(&subst)).collect();
            Ok(Clause::new(literals, ClauseOrigin::Derived))
        }
    }
}
