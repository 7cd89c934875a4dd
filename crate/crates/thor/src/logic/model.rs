//! Finite Tarskian models: the ground-truth oracle for generated theories.

use super::formula::Formula;
use super::term::Term;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("arity mismatch for `{0}`")]
    ArityMismatch(String),
    #[error("function table for `{0}` is not total")]
    PartialTable(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("value {0} outside domain of size {1}")]
    OutOfDomain(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredTable {
    pub arity: usize,
    pub true_tuples: BTreeSet<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuncTable {
    pub arity: usize,
    /// Total map from argument tuples to domain elements, kept as sorted
    /// entries so the JSON form is stable.
    pub entries: Vec<(Vec<usize>, usize)>,
}

impl FuncTable {
    pub fn lookup(&self, args: &[usize]) -> Option<usize> {
        self.entries
            .binary_search_by(|(k, _)| k.as_slice().cmp(args))
            .ok()
            .map(|i| self.entries[i].1)
    }
}

/// A finite model over domain {0, .., domain_size-1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteModel {
    pub domain_size: usize,
    pub predicates: BTreeMap<String, PredTable>,
    pub functions: BTreeMap<String, FuncTable>,
}

impl FiniteModel {
    /// Checks totality and domain bounds of every table.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.domain_size == 0 {
            return Err(ModelError::OutOfDomain(0, 0));
        }
        for (name, t) in &self.predicates {
            for tuple in &t.true_tuples {
                if tuple.len() != t.arity {
                    return Err(ModelError::ArityMismatch(name.clone()));
                }
                if tuple.iter().any(|&v| v >= self.domain_size) {
                    return Err(ModelError::OutOfDomain(
                        *tuple.iter().max().unwrap(),
                        self.domain_size,
                    ));
                }
            }
        }
        for (name, t) in &self.functions {
            let expected = self.domain_size.pow(t.arity as u32);
            if t.entries.len() != expected {
                return Err(ModelError::PartialTable(name.clone()));
            }
            for (args, value) in &t.entries {
                if args.len() != t.arity {
                    return Err(ModelError::ArityMismatch(name.clone()));
                }
                if *value >= self.domain_size || args.iter().any(|&v| v >= self.domain_size) {
                    return Err(ModelError::OutOfDomain(*value, self.domain_size));
                }
            }
            // Sorted, duplicate-free entries are what `lookup` relies on.
            if t.entries.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(ModelError::PartialTable(name.clone()));
            }
        }
        Ok(())
    }

    pub fn eval_term(&self, t: &Term, env: &BTreeMap<String, usize>) -> Result<usize, ModelError> {
        match t {
            Term::Var(v) => env
                .get(v)
                .copied()
                .ok_or_else(|| ModelError::UnboundVariable(v.clone())),
            Term::App(f, args) => {
                let table = self
                    .functions
                    .get(f)
                    .ok_or_else(|| ModelError::UnknownFunction(f.clone()))?;
                if table.arity != args.len() {
                    return Err(ModelError::ArityMismatch(f.clone()));
                }
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval_term(a, env)?);
                }
                table
                    .lookup(&vals)
                    .ok_or_else(|| ModelError::PartialTable(f.clone()))
            }
        }
    }

    pub fn eval(
        &self,
        f: &Formula,
        env: &mut BTreeMap<String, usize>,
    ) -> Result<bool, ModelError> {
        match f {
            Formula::Atom(p, args) => {
                let table = self
                    .predicates
                    .get(p)
                    .ok_or_else(|| ModelError::UnknownPredicate(p.clone()))?;
                if table.arity != args.len() {
                    return Err(ModelError::ArityMismatch(p.clone()));
                }
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval_term(a, env)?);
                }
                Ok(table.true_tuples.contains(&vals))
            }
            Formula::Not(a) => Ok(!self.eval(a, env)?),
            Formula::And(a, b) => Ok(self.eval(a, env)? && self.eval(b, env)?),
            Formula::Or(a, b) => Ok(self.eval(a, env)? || self.eval(b, env)?),
            Formula::Implies(a, b) => Ok(!self.eval(a, env)? || self.eval(b, env)?),
            Formula::Forall(v, a) => {
                let saved = env.get(v).copied();
                for d in 0..self.domain_size {
                    env.insert(v.clone(), d);
                    let ok = self.eval(a, env)?;
                    if !ok {
                        restore(env, v, saved);
                        return Ok(false);
                    }
                }
                restore(env, v, saved);
                Ok(true)
            }
            Formula::Exists(v, a) => {
                let saved = env.get(v).copied();
                for d in 0..self.domain_size {
                    env.insert(v.clone(), d);
                    let ok = self.eval(a, env)?;
                    if ok {
                        restore(env, v, saved);
                        return Ok(true);
                    }
                }
                restore(env, v, saved);
                Ok(false)
            }
        }
    }

    pub fn eval_closed(&self, f: &Formula) -> Result<bool, ModelError> {
        self.eval(f, &mut BTreeMap::new())
    }
}

fn restore(env: &mut BTreeMap<String, usize>, v: &str, saved: Option<usize>) {
    match saved {
        Some(x) => {
            env.insert(v.to_string(), x);
        }
        None => {
            env.remove(v);
        }
    }
}
