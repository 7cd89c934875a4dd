//! The proof kernel: the only code that may transform a `ProofState`.
//!
//! Every step acts on the first open goal. Steps either fail with a
//! `KernelError` (the state is unchanged) or return the successor state.
//! Certificates are checked by replay against the kernel's own
//! clausification of the goal, so a `by_cert` step is exactly as trustworthy
//! as the tactic steps around it.

use super::formula::Formula;
use super::goal::{Goal, ProofState, TheoremLibrary};
use super::step::ProofStep;
use super::subst::Subst;
use super::term::Term;
use crate::hammer::certificate::CertificateError;
use crate::hammer::clausify::{clausify_goal_problem, ClausifyError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("no open goals")]
    NoOpenGoals,
    #[error("`{step}` does not apply to conclusion `{conclusion}`")]
    BadConclusion {
        step: &'static str,
        conclusion: String,
    },
    #[error("unknown hypothesis `{0}`")]
    UnknownHypothesis(String),
    #[error("`{step}` does not apply to hypothesis `{name} : {formula}`")]
    BadHypothesis {
        step: &'static str,
        name: String,
        formula: String,
    },
    #[error("unknown fact `{0}`")]
    UnknownFact(String),
    #[error("no hypothesis or fact matches the conclusion")]
    NoMatchingAssumption,
    #[error("witness `{0}` is not a well-formed ground term")]
    IllFormedWitness(String),
    #[error("fact `{0}` is not an implication chain under a universal prefix")]
    FactNotApplicable(String),
    #[error("fact `{name}` does not conclude the current goal")]
    ApplyMismatch { name: String },
    #[error("applying `{name}` leaves variable `{var}` uninstantiated")]
    ApplyUnbound { name: String, var: String },
    #[error("certificate `{0}` has no payload to check")]
    CertificateMissing(String),
    #[error("step names certificate `{step_id}` but carries `{payload_id}`")]
    CertificateIdMismatch { step_id: String, payload_id: String },
    #[error("certificate rejected: {0}")]
    CertificateRejected(#[from] CertificateError),
    #[error("`<hammer>` is not a kernel step; it must be resolved to a certificate")]
    HammerNotExecutable,
    #[error("proof ends with {0} open goal(s)")]
    Incomplete(usize),
}

impl From<ClausifyError> for KernelError {
    fn from(e: ClausifyError) -> KernelError {
        match e {
            ClausifyError::UnknownPremise(name) => KernelError::UnknownFact(name),
        }
    }
}

/// A proof-script failure: which step broke and how. `step_index` equals the
/// script length when the script ran out with goals still open.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("step {step_index}: {error}")]
pub struct ProofFailure {
    pub step_index: usize,
    #[source]
    pub error: KernelError,
}

pub fn is_proved(state: &ProofState) -> bool {
    state.goals.is_empty()
}

/// Apply one step to the first goal, returning the successor state.
pub fn apply_step(
    library: &TheoremLibrary,
    state: &ProofState,
    step: &ProofStep,
) -> Result<ProofState, KernelError> {
    let goal = state.goals.first().ok_or(KernelError::NoOpenGoals)?;
    let mut next = state.clone();
    let replacement: Vec<Goal> = match step {
        ProofStep::Intro => match &goal.conclusion {
            Formula::Implies(a, b) => {
                let mut g = goal.clone();
                g.hypotheses
                    .push((state.fresh_hypothesis_name(), (**a).clone()));
                g.conclusion = (**b).clone();
                vec![g]
            }
            Formula::Forall(x, body) => {
                let name = state.fresh_constant_name(&library.signature);
                next.local_signature
                    .declare_function(name.clone(), 0)
                    .expect("fresh constant is fresh");
                let mut g = goal.clone();
                g.conclusion = body.substitute_var(x, &Term::constant(&name));
                vec![g]
            }
            other => {
                return Err(KernelError::BadConclusion {
                    step: "intro",
                    conclusion: other.to_string(),
                })
            }
        },
        ProofStep::Split => match &goal.conclusion {
            Formula::And(a, b) => {
                let mut left = goal.clone();
                left.conclusion = (**a).clone();
                let mut right = goal.clone();
                right.conclusion = (**b).clone();
                vec![left, right]
            }
            other => {
                return Err(KernelError::BadConclusion {
                    step: "split",
                    conclusion: other.to_string(),
                })
            }
        },
        ProofStep::Left => match &goal.conclusion {
            Formula::Or(a, _) => {
                let mut g = goal.clone();
                g.conclusion = (**a).clone();
                vec![g]
            }
            other => {
                return Err(KernelError::BadConclusion {
                    step: "left",
                    conclusion: other.to_string(),
                })
            }
        },
        ProofStep::Right => match &goal.conclusion {
            Formula::Or(_, b) => {
                let mut g = goal.clone();
                g.conclusion = (**b).clone();
                vec![g]
            }
            other => {
                return Err(KernelError::BadConclusion {
                    step: "right",
                    conclusion: other.to_string(),
                })
            }
        },
        ProofStep::ExistsWitness(term) => match &goal.conclusion {
            Formula::Exists(x, body) => {
                let merged = library.signature.merged(&state.local_signature);
                if !merged.term_well_formed(term) {
                    return Err(KernelError::IllFormedWitness(term.to_string()));
                }
                let mut g = goal.clone();
                g.conclusion = body.substitute_var(x, term);
                vec![g]
            }
            other => {
                return Err(KernelError::BadConclusion {
                    step: "exists",
                    conclusion: other.to_string(),
                })
            }
        },
        ProofStep::Assumption => {
            let hit = goal
                .hypotheses
                .iter()
                .any(|(_, h)| h.alpha_eq(&goal.conclusion))
                || library.iter().any(|(_, f)| f.alpha_eq(&goal.conclusion));
            if !hit {
                return Err(KernelError::NoMatchingAssumption);
            }
            vec![]
        }
        ProofStep::Destruct(name) => {
            let pos = goal
                .hypotheses
                .iter()
                .position(|(n, _)| n == name)
                .ok_or_else(|| KernelError::UnknownHypothesis(name.clone()))?;
            let formula = goal.hypotheses[pos].1.clone();
            match &formula {
                Formula::And(a, b) => {
                    let k = state.fresh_hypothesis_index();
                    let mut g = goal.clone();
                    g.hypotheses.splice(
                        pos..=pos,
                        [
                            (format!("h{k}"), (**a).clone()),
                            (format!("h{}", k + 1), (**b).clone()),
                        ],
                    );
                    vec![g]
                }
                Formula::Exists(x, body) => {
                    let c = state.fresh_constant_name(&library.signature);
                    next.local_signature
                        .declare_function(c.clone(), 0)
                        .expect("fresh constant is fresh");
                    let mut g = goal.clone();
                    g.hypotheses[pos] = (
                        state.fresh_hypothesis_name(),
                        body.substitute_var(x, &Term::constant(&c)),
                    );
                    vec![g]
                }
                other => {
                    return Err(KernelError::BadHypothesis {
                        step: "destruct",
                        name: name.clone(),
                        formula: other.to_string(),
                    })
                }
            }
        }
        ProofStep::Cases(name) => {
            let pos = goal
                .hypotheses
                .iter()
                .position(|(n, _)| n == name)
                .ok_or_else(|| KernelError::UnknownHypothesis(name.clone()))?;
            let formula = goal.hypotheses[pos].1.clone();
            match &formula {
                Formula::Or(a, b) => {
                    // Both branches keep the hypothesis name.
                    let mut left = goal.clone();
                    left.hypotheses[pos].1 = (**a).clone();
                    let mut right = goal.clone();
                    right.hypotheses[pos].1 = (**b).clone();
                    vec![left, right]
                }
                other => {
                    return Err(KernelError::BadHypothesis {
                        step: "cases",
                        name: name.clone(),
                        formula: other.to_string(),
                    })
                }
            }
        }
        ProofStep::Apply(name) => {
            let fact = library
                .fact(name)
                .ok_or_else(|| KernelError::UnknownFact(name.clone()))?;
            let (vars, antecedents, consequent) = peel_apply_form(fact)
                .ok_or_else(|| KernelError::FactNotApplicable(name.clone()))?;
            let mut subst = Subst::new();
            if !match_formula(&consequent, &goal.conclusion, &mut subst) {
                return Err(KernelError::ApplyMismatch { name: name.clone() });
            }
            let mut map = std::collections::BTreeMap::new();
            for v in &vars {
                match subst.get(v) {
                    Some(_) => {
                        map.insert(v.clone(), subst.resolve(&Term::Var(v.clone())));
                    }
                    None => {
                        return Err(KernelError::ApplyUnbound {
                            name: name.clone(),
                            var: v.clone(),
                        })
                    }
                }
            }
            antecedents
                .iter()
                .map(|a| {
                    let mut g = goal.clone();
                    g.conclusion = a.substitute(&map);
                    g
                })
                .collect()
        }
        ProofStep::ByCertificate(cert_step) => {
            let cert = cert_step
                .certificate
                .as_ref()
                .ok_or_else(|| KernelError::CertificateMissing(cert_step.cert_id.clone()))?;
            if cert.id != cert_step.cert_id {
                return Err(KernelError::CertificateIdMismatch {
                    step_id: cert_step.cert_id.clone(),
                    payload_id: cert.id.clone(),
                });
            }
            let problem = clausify_goal_problem(library, goal, &cert_step.premises)?;
            cert.replay(&problem)?;
            vec![]
        }
        ProofStep::HammerToken => return Err(KernelError::HammerNotExecutable),
    };
    next.goals.splice(0..1, replacement);
    next.step_count = state.step_count + 1;
    Ok(next)
}

/// Run a whole script from `statement`, requiring it to close every goal.
pub fn check_proof(
    library: &TheoremLibrary,
    statement: &Formula,
    steps: &[ProofStep],
) -> Result<(), ProofFailure> {
    let mut state = ProofState::initial(statement);
    for (step_index, step) in steps.iter().enumerate() {
        state = apply_step(library, &state, step)
            .map_err(|error| ProofFailure { step_index, error })?;
    }
    if is_proved(&state) {
        Ok(())
    } else {
        Err(ProofFailure {
            step_index: steps.len(),
            error: KernelError::Incomplete(state.goals.len()),
        })
    }
}

/// Split a fact into (universal prefix, antecedents, consequent); the matrix
/// must be quantifier-free for `apply` to use it.
fn peel_apply_form(fact: &Formula) -> Option<(Vec<String>, Vec<Formula>, Formula)> {
    let mut vars: Vec<String> = Vec::new();
    let mut f = fact;
    while let Formula::Forall(x, body) = f {
        if !vars.contains(x) {
            vars.push(x.clone());
        }
        f = body;
    }
    let mut antecedents = Vec::new();
    while let Formula::Implies(a, b) = f {
        antecedents.push((**a).clone());
        f = b;
    }
    let consequent = f.clone();
    if antecedents.iter().any(has_quantifier) || has_quantifier(&consequent) {
        return None;
    }
    Some((vars, antecedents, consequent))
}

fn has_quantifier(f: &Formula) -> bool {
    match f {
        Formula::Atom(_, _) => false,
        Formula::Not(a) => has_quantifier(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            has_quantifier(a) || has_quantifier(b)
        }
        Formula::Forall(_, _) | Formula::Exists(_, _) => true,
    }
}

/// One-sided structural match of a quantifier-free pattern against a closed
/// target, instantiating pattern variables.
fn match_formula(pattern: &Formula, target: &Formula, subst: &mut Subst) -> bool {
    match (pattern, target) {
        (Formula::Atom(p, pa), Formula::Atom(q, qa)) => {
            p == q && subst.match_all(pa, qa)
        }
        (Formula::Not(a), Formula::Not(b)) => match_formula(a, b, subst),
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Implies(a1, a2), Formula::Implies(b1, b2)) => {
            match_formula(a1, b1, subst) && match_formula(a2, b2, subst)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hammer::certificate::{CertInference, CertInput, CertRule, Certificate};
    use crate::logic::parse::{parse_formula, parse_state, parse_step};
    use crate::logic::step::CertStep;
    use crate::logic::term::Signature;
    use std::sync::Arc;

    fn library() -> TheoremLibrary {
        let mut sig = Signature::default();
        sig.declare_predicate("p", 1).unwrap();
        sig.declare_predicate("q", 1).unwrap();
        sig.declare_predicate("r", 0).unwrap();
        sig.declare_function("a", 0).unwrap();
        let mut lib = TheoremLibrary::new(sig);
        lib.add_fact("imp", parse_formula("forall x. p(x) -> q(x)").unwrap())
            .unwrap();
        lib.add_fact("ground", parse_formula("p(a)").unwrap())
            .unwrap();
        lib
    }

    fn run(lib: &TheoremLibrary, statement: &str, script: &str) -> Result<ProofState, KernelError> {
        let mut state = ProofState::initial(&parse_formula(statement).unwrap());
        for line in script.lines().map(str::trim).filter(|l| !l.is_empty()) {
            state = apply_step(lib, &state, &parse_step(line).unwrap())?;
        }
        Ok(state)
    }

    #[test]
    fn intro_implication_and_forall() {
        let lib = library();
        let state = run(&lib, "forall x. p(x) -> p(x)", "intro\nintro").unwrap();
        assert_eq!(state.to_string(), "h0 : p(_c0) |- p(_c0)");
        let done = apply_step(&lib, &state, &ProofStep::Assumption).unwrap();
        assert!(is_proved(&done));
        assert_eq!(done.step_count, 3);
    }

    #[test]
    fn split_orders_subgoals() {
        let lib = library();
        let state = run(&lib, "p(a) & q(a)", "split").unwrap();
        assert_eq!(state.to_string(), "|- p(a) || |- q(a)");
    }

    #[test]
    fn left_right_and_witness() {
        let lib = library();
        let state = run(&lib, "q(a) | p(a)", "right\nassumption");
        assert!(is_proved(&state.unwrap()));
        let state = run(&lib, "exists x. p(x)", "exists a\nassumption").unwrap();
        assert!(is_proved(&state));
        // Unknown constant in witness.
        let bad = run(&lib, "exists x. p(x)", "exists b");
        assert_eq!(bad, Err(KernelError::IllFormedWitness("b".into())));
    }

    #[test]
    fn assumption_is_alpha_aware() {
        let mut lib = library();
        lib.add_fact("univ", parse_formula("forall x. p(x) | ~p(x)").unwrap())
            .unwrap();
        // Same fact under a different binder name.
        let state = run(&lib, "forall y. p(y) | ~p(y)", "assumption").unwrap();
        assert!(is_proved(&state));
    }

    #[test]
    fn destruct_and_cases() {
        let lib = library();
        // Fresh names come from the pre-step state, where h0 still exists.
        let state = run(&lib, "(p(a) & q(a)) -> q(a)", "intro\ndestruct h0").unwrap();
        assert_eq!(state.to_string(), "h1 : p(a), h2 : q(a) |- q(a)");

        let state = run(&lib, "(p(a) | q(a)) -> p(a) | q(a)", "intro\ncases h0").unwrap();
        assert_eq!(
            state.to_string(),
            "h0 : p(a) |- p(a) | q(a) || h0 : q(a) |- p(a) | q(a)"
        );

        let state = run(
            &lib,
            "(exists x. p(x)) -> exists x. p(x)",
            "intro\ndestruct h0",
        )
        .unwrap();
        assert_eq!(state.to_string(), "h1 : p(_c0) |- exists x. p(x)");
        let done = run(
            &lib,
            "(exists x. p(x)) -> exists x. p(x)",
            "intro\ndestruct h0\nexists _c0\nassumption",
        )
        .unwrap();
        assert!(is_proved(&done));
    }

    #[test]
    fn apply_instantiates_and_subgoals() {
        let lib = library();
        let state = run(&lib, "q(a)", "apply imp").unwrap();
        assert_eq!(state.to_string(), "|- p(a)");
        let done = apply_step(&lib, &state, &ProofStep::Apply("ground".into())).unwrap();
        assert!(is_proved(&done));
        // Consequent mismatch.
        assert_eq!(
            run(&lib, "p(a)", "apply imp"),
            Err(KernelError::ApplyMismatch { name: "imp".into() })
        );
    }

    #[test]
    fn apply_rejects_unbound_prefix_variable() {
        let mut lib = library();
        lib.add_fact(
            "loose",
            parse_formula("forall x. forall y. p(y) -> q(x)").unwrap(),
        )
        .unwrap();
        assert_eq!(
            run(&lib, "q(a)", "apply loose"),
            Err(KernelError::ApplyUnbound {
                name: "loose".into(),
                var: "y".into()
            })
        );
    }

    #[test]
    fn hammer_token_is_rejected() {
        let lib = library();
        assert_eq!(
            run(&lib, "q(a)", "<hammer>"),
            Err(KernelError::HammerNotExecutable)
        );
    }

    #[test]
    fn by_cert_checks_out_end_to_end() {
        let lib = library();
        // Goal q(a) with premises [imp, ground]:
        //   ~p(X) | q(X)   (imp)
        //   p(a)           (ground)
        //   ~q(a)          (negated goal)
        let goal = Goal {
            hypotheses: vec![],
            conclusion: parse_formula("q(a)").unwrap(),
        };
        let premises = vec!["imp".to_string(), "ground".to_string()];
        let problem = clausify_goal_problem(&lib, &goal, &premises).unwrap();
        let inputs: Vec<CertInput> = problem
            .iter()
            .map(|c| CertInput {
                origin: c.origin.clone(),
                literals: c.literals.clone(),
            })
            .collect();
        let inferences = vec![
            // q(L0) from imp x ground, binding L0 = a.
            CertInference {
                rule: CertRule::Resolve {
                    left: 0,
                    left_lit: 0,
                    right: 1,
                    right_lit: 0,
                },
                subst: vec![("L0".into(), Term::constant("a"))],
            },
            CertInference {
                rule: CertRule::Resolve {
                    left: 3,
                    left_lit: 0,
                    right: 2,
                    right_lit: 0,
                },
                subst: vec![],
            },
        ];
        let cert = Arc::new(Certificate::assemble(inputs, inferences));
        let step = ProofStep::ByCertificate(
            CertStep::new(cert.id.clone(), premises).with_certificate(cert),
        );
        let state = ProofState::initial(&parse_formula("q(a)").unwrap());
        let done = apply_step(&lib, &state, &step).unwrap();
        assert!(is_proved(&done));
    }

    #[test]
    fn by_cert_requires_payload() {
        let lib = library();
        let step = parse_step("by_cert c123456789abc [imp]").unwrap();
        let state = ProofState::initial(&parse_formula("q(a)").unwrap());
        assert_eq!(
            apply_step(&lib, &state, &step),
            Err(KernelError::CertificateMissing("c123456789abc".into()))
        );
    }

    #[test]
    fn check_proof_reports_failing_step() {
        let lib = library();
        let statement = parse_formula("p(a) -> p(a)").unwrap();
        let ok = check_proof(
            &lib,
            &statement,
            &[ProofStep::Intro, ProofStep::Assumption],
        );
        assert_eq!(ok, Ok(()));
        let bad = check_proof(&lib, &statement, &[ProofStep::Split]);
        assert_eq!(
            bad.unwrap_err(),
            ProofFailure {
                step_index: 0,
                error: KernelError::BadConclusion {
                    step: "split",
                    conclusion: "p(a) -> p(a)".into()
                }
            }
        );
        let short = check_proof(&lib, &statement, &[ProofStep::Intro]);
        assert_eq!(
            short.unwrap_err(),
            ProofFailure {
                step_index: 1,
                error: KernelError::Incomplete(1)
            }
        );
    }

    #[test]
    fn steps_only_touch_the_first_goal() {
        let lib = library();
        let base = Signature::default();
        let state = parse_state("|- p(a) & q(a) || |- r", &lib.signature.merged(&base)).unwrap();
        let next = apply_step(&lib, &state, &ProofStep::Split).unwrap();
        assert_eq!(next.to_string(), "|- p(a) || |- q(a) || |- r");
    }
}
