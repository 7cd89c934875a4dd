//! Substitutions, syntactic unification (with occurs check), and one-sided
//! matching.

use super::term::Term;
use std::collections::BTreeMap;

/// A triangular substitution: bindings may mention variables bound later.
/// `resolve` applies it transitively.
#[derive(Clone, Debug, Default)]
pub struct Subst {
    map: BTreeMap<String, Term>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    /// Rebuild from fully resolved bindings (certificate replay).
    pub fn from_resolved(bindings: &[(String, Term)]) -> Subst {
        Subst {
            map: bindings.iter().cloned().collect(),
        }
    }

    pub fn get(&self, v: &str) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Follows variable chains without descending into applications.
    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.map.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Fully applies the substitution.
    pub fn resolve(&self, t: &Term) -> Term {
        let t = self.walk(t);
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| self.resolve(a)).collect())
            }
        }
    }

    fn occurs(&self, v: &str, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    /// Extends the substitution to make `a` and `b` equal. On failure the
    /// substitution may contain bindings added along the way, so unify into a
    /// scratch clone when failure must roll back.
    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if self.occurs(&x, &t) {
                    false
                } else {
                    self.map.insert(x, t);
                    true
                }
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(&ys).all(|(x, y)| self.unify(x, y))
            }
        }
    }

    pub fn unify_all(&mut self, xs: &[Term], ys: &[Term]) -> bool {
        xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
    }

    /// One-sided matching: only variables of `pattern` may be bound; variables
    /// of `target` are rigid. Bindings always map pattern variables to target
    /// subterms.
    pub fn match_term(&mut self, pattern: &Term, target: &Term) -> bool {
        match pattern {
            Term::Var(v) => match self.map.get(v) {
                Some(bound) => bound == target,
                None => {
                    self.map.insert(v.clone(), target.clone());
                    true
                }
            },
            Term::App(f, xs) => match target {
                Term::App(g, ys) => {
                    f == g
                        && xs.len() == ys.len()
                        && xs.iter().zip(ys).all(|(x, y)| self.match_term(x, y))
                }
                Term::Var(_) => false,
            },
        }
    }

    pub fn match_all(&mut self, patterns: &[Term], targets: &[Term]) -> bool {
        patterns.len() == targets.len()
            && patterns
                .iter()
                .zip(targets)
                .all(|(p, t)| self.match_term(p, t))
    }

    /// Bound variables with fully-resolved replacement terms, sorted by name.
    pub fn resolved_bindings(&self) -> Vec<(String, Term)> {
        self.map
            .keys()
            .map(|v| (v.clone(), self.resolve(&Term::Var(v.clone()))))
            .collect()
    }
}
