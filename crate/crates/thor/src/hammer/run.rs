//! The hammer driver: select premises, saturate, shrink to used premises.
//!
//! Skolem numbering is global across the problem, so a certificate found
//! with the full selection would not replay against the kernel's
//! clausification of just the used premises. The driver therefore reruns
//! saturation on exactly the used premises until the used set reaches a
//! fixed point; the final certificate replays byte-for-byte against the
//! goal plus its own premise list.

use super::certificate::Certificate;
use super::clause::ClauseOrigin;
use super::clausify::clausify_goal_problem;
use super::saturate::{saturate, SaturationStatus};
use super::select::select_premises;
use crate::logic::goal::{Goal, TheoremLibrary};
use crate::logic::step::{CertStep, ProofStep};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HammerBudget {
    pub max_selected_premises: usize,
    pub max_inferences: u64,
    pub wallclock_secs: Option<u64>,
}

impl Default for HammerBudget {
    fn default() -> HammerBudget {
        HammerBudget {
            max_selected_premises: 128,
            max_inferences: 50_000,
            wallclock_secs: Some(30),
        }
    }
}

impl HammerBudget {
    /// Budget scaled by `factor` (standalone hammer-only runs get slack).
    pub fn scaled(&self, factor: u64) -> HammerBudget {
        HammerBudget {
            max_selected_premises: self.max_selected_premises,
            max_inferences: self.max_inferences * factor,
            wallclock_secs: self.wallclock_secs.map(|s| s * factor),
        }
    }

    /// Same limits with no wallclock: bit-for-bit reproducible outcomes.
    pub fn without_wallclock(&self) -> HammerBudget {
        HammerBudget {
            wallclock_secs: None,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug)]
pub struct HammerOutcome {
    pub status: SaturationStatus,
    pub certificate: Option<Arc<Certificate>>,
    /// What premise selection offered, in rank order.
    pub selected_premises: Vec<String>,
    /// What the final certificate actually consumed (empty unless proved).
    pub used_premises: Vec<String>,
    /// Summed over all fixed-point rounds.
    pub inferences_used: u64,
    pub rounds: u32,
    /// Which saturation backend produced the certificate.
    pub prover: &'static str,
}

impl HammerOutcome {
    pub fn proved(&self) -> bool {
        self.status == SaturationStatus::Proved
    }

    /// The kernel-checkable step this outcome justifies.
    pub fn to_step(&self) -> Option<ProofStep> {
        let cert = self.certificate.clone()?;
        Some(ProofStep::ByCertificate(
            CertStep::new(cert.id.clone(), self.used_premises.clone()).with_certificate(cert),
        ))
    }
}

/// Premise names a certificate consumed, in first-appearance order (which
/// follows problem order, hence selection rank order).
fn premises_of(cert: &Certificate) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for input in &cert.inputs {
        if let ClauseOrigin::Premise(name) = &input.origin {
            if !out.contains(name) {
                out.push(name.clone());
            }
        }
    }
    out
}

/// Try to close `goal` by refutation within `budget`.
pub fn hammer(library: &TheoremLibrary, goal: &Goal, budget: &HammerBudget) -> HammerOutcome {
    let selected = select_premises(library, goal, budget.max_selected_premises);
    let deadline = budget
        .wallclock_secs
        .map(|s| Instant::now() + Duration::from_secs(s));
    let mut premises = selected.clone();
    let mut inferences_used = 0u64;
    let mut rounds = 0u32;
    loop {
        rounds += 1;
        let problem = clausify_goal_problem(library, goal, &premises)
            .expect("selected premises come from the library");
        let out = saturate(&problem, budget.max_inferences, deadline);
        inferences_used += out.inferences_used;
        match out.status {
            SaturationStatus::Proved => {
                let cert = out.certificate.expect("proved outcomes carry a certificate");
                let used = premises_of(&cert);
                if used == premises {
                    return HammerOutcome {
                        status: SaturationStatus::Proved,
                        certificate: Some(Arc::new(cert)),
                        selected_premises: selected,
                        used_premises: used,
                        inferences_used,
                        rounds,
                        prover: "saturate-v1",
                    };
                }
                premises = used;
            }
            status => {
                return HammerOutcome {
                    status,
                    certificate: None,
                    selected_premises: selected,
                    used_premises: Vec::new(),
                    inferences_used,
                    rounds,
                    prover: "saturate-v1",
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::kernel::{apply_step, is_proved};
    use crate::logic::goal::ProofState;
    use crate::logic::parse::parse_formula;
    use crate::logic::term::Signature;

    fn budget() -> HammerBudget {
        HammerBudget::default().without_wallclock()
    }

    #[test]
    fn proves_and_kernel_accepts_the_step() {
        let mut sig = Signature::default();
        sig.declare_predicate("p", 1).unwrap();
        sig.declare_predicate("q", 1).unwrap();
        sig.declare_function("a", 0).unwrap();
        let mut lib = TheoremLibrary::new(sig);
        lib.add_fact("imp", parse_formula("forall x. p(x) -> q(x)").unwrap())
            .unwrap();
        lib.add_fact("pa", parse_formula("p(a)").unwrap()).unwrap();

        let statement = parse_formula("q(a)").unwrap();
        let state = ProofState::initial(&statement);
        let out = hammer(&lib, state.first_goal().unwrap(), &budget());
        assert!(out.proved());
        assert_eq!(out.used_premises, vec!["imp", "pa"]);
        let step = out.to_step().unwrap();
        let done = apply_step(&lib, &state, &step).unwrap();
        assert!(is_proved(&done));
    }

    #[test]
    fn fixed_point_renumbers_skolems_for_replay() {
        // `junk` is picked first (perfect symbol overlap with the goal) and
        // takes Skolem index 0; the refutation uses only `bridge` and
        // `real`, whose Skolem constant shifts once junk is dropped. Without
        // the rerun the certificate would cite qm(_sk1) against a problem
        // containing qm(_sk0).
        let mut sig = Signature::default();
        sig.declare_predicate("q", 1).unwrap();
        sig.declare_predicate("qm", 1).unwrap();
        sig.declare_function("a", 0).unwrap();
        let mut lib = TheoremLibrary::new(sig);
        lib.add_fact("junk", parse_formula("exists w. q(w)").unwrap())
            .unwrap();
        lib.add_fact(
            "bridge",
            parse_formula("forall x. forall y. qm(y) -> q(x)").unwrap(),
        )
        .unwrap();
        lib.add_fact("real", parse_formula("exists y. qm(y)").unwrap())
            .unwrap();

        let statement = parse_formula("q(a)").unwrap();
        let state = ProofState::initial(&statement);
        let out = hammer(&lib, state.first_goal().unwrap(), &budget());
        assert!(out.proved());
        assert_eq!(out.used_premises, vec!["bridge", "real"]);
        assert_eq!(out.rounds, 2);
        let step = out.to_step().unwrap();
        let done = apply_step(&lib, &state, &step).unwrap();
        assert!(is_proved(&done));
    }

    #[test]
    fn unprovable_goal_saturates() {
        let mut sig = Signature::default();
        sig.declare_predicate("p", 1).unwrap();
        sig.declare_predicate("q", 1).unwrap();
        sig.declare_function("a", 0).unwrap();
        let mut lib = TheoremLibrary::new(sig);
        lib.add_fact("pa", parse_formula("p(a)").unwrap()).unwrap();

        let statement = parse_formula("q(a)").unwrap();
        let state = ProofState::initial(&statement);
        let out = hammer(&lib, state.first_goal().unwrap(), &budget());
        assert_eq!(out.status, SaturationStatus::Saturated);
        assert!(out.to_step().is_none());
        assert!(out.used_premises.is_empty());
    }

    #[test]
    fn hypotheses_join_the_problem() {
        let mut sig = Signature::default();
        sig.declare_predicate("p", 1).unwrap();
        sig.declare_predicate("q", 1).unwrap();
        sig.declare_function("a", 0).unwrap();
        let lib = TheoremLibrary::new(sig);

        // No facts at all: p(a) -> p(a) via its own hypothesis.
        let statement = parse_formula("p(a) -> p(a)").unwrap();
        let state = ProofState::initial(&statement);
        let state = apply_step(&lib, &state, &crate::logic::step::ProofStep::Intro).unwrap();
        let out = hammer(&lib, state.first_goal().unwrap(), &budget());
        assert!(out.proved());
        assert!(out.used_premises.is_empty());
        let done = apply_step(&lib, &state, &out.to_step().unwrap()).unwrap();
        assert!(is_proved(&done));
    }
}
