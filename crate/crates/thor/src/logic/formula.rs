//! Untyped first-order formulas without equality.

use super::term::{Signature, Term};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

/// Predicate and function symbols occurring in a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolSet {
    pub predicates: BTreeSet<String>,
    pub functions: BTreeSet<String>,
}

impl SymbolSet {
    /// Symbols as one set, namespaced by class so a predicate and a function
    /// with the same name never collide.
    pub fn tagged(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for p in &self.predicates {
            out.insert(format!("P:{p}"));
        }
        for f in &self.functions {
            out.insert(format!("F:{f}"));
        }
        out
    }
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(pred.into(), args)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(f))
    }

    pub fn exists(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(f))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Atom(_, args) => {
                    let mut vs = Vec::new();
                    for a in args {
                        a.collect_vars(&mut vs);
                    }
                    for v in vs {
                        if !bound.iter().any(|b| *b == v) {
                            out.insert(v);
                        }
                    }
                }
                Formula::Not(a) => go(a, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Forall(v, a) | Formula::Exists(v, a) => {
                    bound.push(v.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn symbols(&self) -> SymbolSet {
        fn go(f: &Formula, out: &mut SymbolSet) {
            match f {
                Formula::Atom(p, args) => {
                    out.predicates.insert(p.clone());
                    for a in args {
                        a.collect_functions(&mut out.functions);
                    }
                }
                Formula::Not(a) => go(a, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Forall(_, a) | Formula::Exists(_, a) => go(a, out),
            }
        }
        let mut out = SymbolSet::default();
        go(self, &mut out);
        out
    }

    /// Checks every atom and term against `sig`, with `scope` tracking bound
    /// variables. Closed well-formed formulas are the kernel's currency.
    pub fn well_formed(&self, sig: &Signature) -> bool {
        fn term_ok(t: &Term, sig: &Signature, scope: &Vec<String>) -> bool {
            match t {
                Term::Var(v) => scope.iter().any(|b| b == v),
                Term::App(f, args) => {
                    sig.function_arity(f) == Some(args.len())
                        && args.iter().all(|a| term_ok(a, sig, scope))
                }
            }
        }
        fn go(f: &Formula, sig: &Signature, scope: &mut Vec<String>) -> bool {
            match f {
                Formula::Atom(p, args) => {
                    sig.predicate_arity(p) == Some(args.len())
                        && args.iter().all(|a| term_ok(a, sig, scope))
                }
                Formula::Not(a) => go(a, sig, scope),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, sig, scope) && go(b, sig, scope)
                }
                Formula::Forall(v, a) | Formula::Exists(v, a) => {
                    scope.push(v.clone());
                    let ok = go(a, sig, scope);
                    scope.pop();
                    ok
                }
            }
        }
        go(self, sig, &mut Vec::new())
    }

    /// Substitutes ground terms for free variables, respecting shadowing.
    /// Panics (debug) if a replacement term is non-ground, since that could
    /// capture.
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Formula {
        debug_assert!(map.values().all(Term::is_ground));
        match self {
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|a| a.substitute(map)).collect())
            }
            Formula::Not(a) => Formula::not(a.substitute(map)),
            Formula::And(a, b) => Formula::and(a.substitute(map), b.substitute(map)),
            Formula::Or(a, b) => Formula::or(a.substitute(map), b.substitute(map)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::Forall(v, a) => {
                if map.contains_key(v) {
                    let mut inner = map.clone();
                    inner.remove(v);
                    Formula::forall(v.clone(), a.substitute(&inner))
                } else {
                    Formula::forall(v.clone(), a.substitute(map))
                }
            }
            Formula::Exists(v, a) => {
                if map.contains_key(v) {
                    let mut inner = map.clone();
                    inner.remove(v);
                    Formula::exists(v.clone(), a.substitute(&inner))
                } else {
                    Formula::exists(v.clone(), a.substitute(map))
                }
            }
        }
    }

    /// Substitutes a single variable.
    pub fn substitute_var(&self, var: &str, replacement: &Term) -> Formula {
        let mut map = BTreeMap::new();
        map.insert(var.to_string(), replacement.clone());
        self.substitute(&map)
    }

    /// Syntactic identity up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        fn term_eq(a: &Term, b: &Term, env: &Vec<(String, String)>) -> bool {
            match (a, b) {
                (Term::Var(x), Term::Var(y)) => {
                    // Compare under the innermost binding of either side.
                    for (l, r) in env.iter().rev() {
                        if l == x || r == y {
                            return l == x && r == y;
                        }
                    }
                    x == y
                }
                (Term::App(f, xs), Term::App(g, ys)) => {
                    f == g
                        && xs.len() == ys.len()
                        && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, env))
                }
                _ => false,
            }
        }
        fn go(a: &Formula, b: &Formula, env: &mut Vec<(String, String)>) -> bool {
            match (a, b) {
                (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
                    p == q
                        && xs.len() == ys.len()
                        && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, env))
                }
                (Formula::Not(x), Formula::Not(y)) => go(x, y, env),
                (Formula::And(x1, x2), Formula::And(y1, y2))
                | (Formula::Or(x1, x2), Formula::Or(y1, y2))
                | (Formula::Implies(x1, x2), Formula::Implies(y1, y2)) => {
                    go(x1, y1, env) && go(x2, y2, env)
                }
                (Formula::Forall(v, x), Formula::Forall(w, y))
                | (Formula::Exists(v, x), Formula::Exists(w, y)) => {
                    env.push((v.clone(), w.clone()));
                    let ok = go(x, y, env);
                    env.pop();
                    ok
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }
}
