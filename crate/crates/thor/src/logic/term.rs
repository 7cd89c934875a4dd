//! First-order terms and signatures.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A first-order term. Constants are 0-ary applications.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Total number of symbol occurrences (variables and function symbols).
    pub fn symbol_count(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::symbol_count).sum::<usize>(),
        }
    }

    /// Appends variables in first-occurrence order, skipping ones already seen.
    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.iter().any(|x| x == v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// Collects function symbols (constants included).
    pub fn collect_functions(&self, out: &mut BTreeSet<String>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone());
            for a in args {
                a.collect_functions(out);
            }
        }
    }

    /// Simultaneous replacement of variables by terms. Replacement terms are
    /// substituted as-is; callers that need capture avoidance must rename
    /// binders first (kernel paths only ever substitute ground terms).
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.substitute(map)).collect())
            }
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate predicate symbol `{0}`")]
    DuplicatePredicate(String),
    #[error("duplicate function symbol `{0}`")]
    DuplicateFunction(String),
}

/// Predicate and function symbols with arities. Names are unique within each
/// class.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, usize>,
}

impl Signature {
    pub fn declare_predicate(
        &mut self,
        name: impl Into<String>,
        arity: usize,
    ) -> Result<(), SignatureError> {
        let name = name.into();
        if self.predicates.contains_key(&name) {
            return Err(SignatureError::DuplicatePredicate(name));
        }
        self.predicates.insert(name, arity);
        Ok(())
    }

    pub fn declare_function(
        &mut self,
        name: impl Into<String>,
        arity: usize,
    ) -> Result<(), SignatureError> {
        let name = name.into();
        if self.functions.contains_key(&name) {
            return Err(SignatureError::DuplicateFunction(name));
        }
        self.functions.insert(name, arity);
        Ok(())
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    /// Union of two signatures; `other` wins on (impossible, by uniqueness)
    /// collisions. Used to view base + local signatures as one.
    pub fn merged(&self, other: &Signature) -> Signature {
        let mut out = self.clone();
        for (k, v) in &other.predicates {
            out.predicates.insert(k.clone(), *v);
        }
        for (k, v) in &other.functions {
            out.functions.insert(k.clone(), *v);
        }
        out
    }

    /// Checks a ground term against this signature (unknown symbols or arity
    /// mismatches fail).
    pub fn term_well_formed(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => false,
            Term::App(f, args) => {
                self.function_arity(f) == Some(args.len())
                    && args.iter().all(|a| self.term_well_formed(a))
            }
        }
    }
}
