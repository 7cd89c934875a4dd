//! Clausification: NNF, standardize-apart, Skolemization, CNF distribution.
//!
//! Variable and Skolem numbering are global to a problem (`V<k>` and
//! `_sk<k>` counters run across all formulas in insertion order), so the
//! clause set produced for a given (hypotheses, premises, conclusion) triple
//! is a pure function of that triple. Certificates depend on this: replay
//! reclausifies and matches inputs byte-for-byte.

use super::clause::{Clause, ClauseOrigin, Literal};
use crate::logic::formula::Formula;
use crate::logic::goal::{Goal, TheoremLibrary};
use crate::logic::term::Term;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ClausifyError {
    #[error("unknown premise `{0}`")]
    UnknownPremise(String),
}

/// Accumulates clauses for one problem with shared counters.
#[derive(Default)]
pub struct ProblemBuilder {
    var_counter: usize,
    skolem_counter: usize,
    clauses: Vec<Clause>,
}

impl ProblemBuilder {
    pub fn new() -> ProblemBuilder {
        ProblemBuilder::default()
    }

    /// Clausify `formula` as an assertion.
    pub fn add(&mut self, formula: &Formula, origin: ClauseOrigin) {
        let matrix = self.skolemize(&nnf(formula, true));
        self.distribute(&matrix, origin);
    }

    /// Clausify the negation of `formula` (the goal side of a refutation).
    pub fn add_negated(&mut self, formula: &Formula, origin: ClauseOrigin) {
        let matrix = self.skolemize(&nnf(formula, false));
        self.distribute(&matrix, origin);
    }

    pub fn finish(self) -> Vec<Clause> {
        self.clauses
    }

    /// Standardize apart and Skolemize an NNF formula, returning a
    /// quantifier-free matrix whose atoms mention only `V<k>` variables and
    /// `_sk<k>` terms.
    fn skolemize(&mut self, f: &Formula) -> Formula {
        let mut env: BTreeMap<String, Term> = BTreeMap::new();
        let mut universals: Vec<Term> = Vec::new();
        self.skolemize_in(f, &mut env, &mut universals)
    }

    fn skolemize_in(
        &mut self,
        f: &Formula,
        env: &mut BTreeMap<String, Term>,
        universals: &mut Vec<Term>,
    ) -> Formula {
        match f {
            Formula::Atom(p, args) => Formula::Atom(
                p.clone(),
                args.iter().map(|t| apply_env(t, env)).collect(),
            ),
            Formula::Not(inner) => {
                // NNF invariant: negation only wraps atoms.
                Formula::not(self.skolemize_in(inner, env, universals))
            }
            Formula::And(a, b) => Formula::and(
                self.skolemize_in(a, env, universals),
                self.skolemize_in(b, env, universals),
            ),
            Formula::Or(a, b) => Formula::or(
                self.skolemize_in(a, env, universals),
                self.skolemize_in(b, env, universals),
            ),
            Formula::Forall(x, body) => {
                let var = Term::Var(format!("V{}", self.var_counter));
                self.var_counter += 1;
                let saved = env.insert(x.clone(), var.clone());
                universals.push(var);
                let out = self.skolemize_in(body, env, universals);
                universals.pop();
                restore(env, x, saved);
                out
            }
            Formula::Exists(x, body) => {
                let sk = Term::App(format!("_sk{}", self.skolem_counter), universals.clone());
                self.skolem_counter += 1;
                let saved = env.insert(x.clone(), sk);
                let out = self.skolemize_in(body, env, universals);
                restore(env, x, saved);
                out
            }
            Formula::Implies(_, _) => unreachable!("implications are eliminated by nnf"),
        }
    }

    /// Distribute Or over And and push the resulting clauses, dropping
    /// tautologies.
    fn distribute(&mut self, matrix: &Formula, origin: ClauseOrigin) {
        for lits in cnf(matrix) {
            let clause = Clause::new(lits, origin.clone());
            if !clause.is_tautology() {
                self.clauses.push(clause);
            }
        }
    }
}

fn restore(env: &mut BTreeMap<String, Term>, key: &str, saved: Option<Term>) {
    match saved {
        Some(t) => {
            env.insert(key.to_string(), t);
        }
        None => {
            env.remove(key);
        }
    }
}

fn apply_env(t: &Term, env: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(v) => env
            .get(v)
            .cloned()
            .unwrap_or_else(|| panic!("free variable `{v}` in clausified formula")),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| apply_env(a, env)).collect(),
        ),
    }
}

/// Negation normal form; `positive == false` builds the NNF of `~f`.
fn nnf(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::Atom(_, _) => {
            if positive {
                f.clone()
            } else {
                Formula::not(f.clone())
            }
        }
        Formula::Not(inner) => nnf(inner, !positive),
        Formula::And(a, b) => {
            if positive {
                Formula::and(nnf(a, true), nnf(b, true))
            } else {
                Formula::or(nnf(a, false), nnf(b, false))
            }
        }
        Formula::Or(a, b) => {
            if positive {
                Formula::or(nnf(a, true), nnf(b, true))
            } else {
                Formula::and(nnf(a, false), nnf(b, false))
            }
        }
        Formula::Implies(a, b) => {
            if positive {
                Formula::or(nnf(a, false), nnf(b, true))
            } else {
                Formula::and(nnf(a, true), nnf(b, false))
            }
        }
        Formula::Forall(x, body) => {
            if positive {
                Formula::forall(x.clone(), nnf(body, true))
            } else {
                Formula::exists(x.clone(), nnf(body, false))
            }
        }
        Formula::Exists(x, body) => {
            if positive {
                Formula::exists(x.clone(), nnf(body, true))
            } else {
                Formula::forall(x.clone(), nnf(body, false))
            }
        }
    }
}

/// CNF of a quantifier-free NNF matrix, as literal lists.
fn cnf(f: &Formula) -> Vec<Vec<Literal>> {
    match f {
        Formula::Atom(p, args) => vec![vec![Literal::new(true, p.clone(), args.clone())]],
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(p, args) => vec![vec![Literal::new(false, p.clone(), args.clone())]],
            _ => unreachable!("negation wraps only atoms after nnf"),
        },
        Formula::And(a, b) => {
            let mut out = cnf(a);
            out.extend(cnf(b));
            out
        }
        Formula::Or(a, b) => {
            let left = cnf(a);
            let right = cnf(b);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    let mut lits = l.clone();
                    lits.extend(r.iter().cloned());
                    out.push(lits);
                }
            }
            out
        }
        _ => unreachable!("matrix is quantifier-free"),
    }
}

/// The refutation problem for a goal: hypotheses, then the named premises in
/// the given order, then the negated conclusion — one global numbering.
pub fn clausify_goal_problem(
    library: &TheoremLibrary,
    goal: &Goal,
    premises: &[String],
) -> Result<Vec<Clause>, ClausifyError> {
    let mut builder = ProblemBuilder::new();
    for (name, hyp) in &goal.hypotheses {
        builder.add(hyp, ClauseOrigin::Hypothesis(name.clone()));
    }
    for name in premises {
        let fact = library
            .fact(name)
            .ok_or_else(|| ClausifyError::UnknownPremise(name.clone()))?;
        builder.add(fact, ClauseOrigin::Premise(name.clone()));
    }
    builder.add_negated(&goal.conclusion, ClauseOrigin::NegatedGoal);
    Ok(builder.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse_formula;

    fn clauses_of(input: &str) -> Vec<String> {
        let f = parse_formula(input).unwrap();
        let mut b = ProblemBuilder::new();
        b.add(&f, ClauseOrigin::Derived);
        b.finish().iter().map(|c| c.canonical_string()).collect()
    }

    #[test]
    fn implication_chain_becomes_one_clause() {
        assert_eq!(
            clauses_of("forall x. p(x) -> q(x) -> r(x)"),
            vec!["~p(X0) | ~q(X0) | r(X0)"]
        );
    }

    #[test]
    fn conjunction_splits() {
        assert_eq!(clauses_of("p & q"), vec!["p", "q"]);
    }

    #[test]
    fn distribution_crosses() {
        assert_eq!(
            clauses_of("(p & q) | r"),
            vec!["p | r", "q | r"]
        );
    }

    #[test]
    fn tautologies_are_dropped() {
        assert!(clauses_of("p | ~p").is_empty());
    }

    #[test]
    fn skolem_terms_capture_universals() {
        assert_eq!(
            clauses_of("forall x. exists y. r(x,y)"),
            vec!["r(X0,_sk0(X0))"]
        );
        // Outermost existential: a fresh constant.
        assert_eq!(clauses_of("exists y. p(y)"), vec!["p(_sk0)"]);
    }

    #[test]
    fn negated_goal_flips_quantifiers() {
        let f = parse_formula("forall x. p(x)").unwrap();
        let mut b = ProblemBuilder::new();
        b.add_negated(&f, ClauseOrigin::NegatedGoal);
        let out: Vec<String> = b.finish().iter().map(|c| c.canonical_string()).collect();
        assert_eq!(out, vec!["~p(_sk0)"]);
    }

    #[test]
    fn numbering_is_global_across_formulas() {
        let mut b = ProblemBuilder::new();
        b.add(
            &parse_formula("exists y. p(y)").unwrap(),
            ClauseOrigin::Hypothesis("h0".into()),
        );
        b.add(
            &parse_formula("exists y. q(y)").unwrap(),
            ClauseOrigin::Premise("f0".into()),
        );
        let out: Vec<String> = b.finish().iter().map(|c| c.canonical_string()).collect();
        assert_eq!(out, vec!["p(_sk0)", "q(_sk1)"]);
    }

    #[test]
    fn nested_negation_normalizes() {
        assert_eq!(clauses_of("~(p & ~q)"), vec!["~p | q"]);
        assert_eq!(clauses_of("~(p | q)"), vec!["~p", "~q"]);
        assert_eq!(clauses_of("~(p -> q)"), vec!["p", "~q"]);
        assert_eq!(clauses_of("~(exists x. p(x))"), vec!["~p(X0)"]);
    }
}
