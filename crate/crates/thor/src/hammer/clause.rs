//! First-order clauses in canonical form.
//!
//! Every `Clause` is kept canonical from birth: variables renamed to
//! `X0, X1, ...` in first-occurrence order and exact-duplicate literals
//! dropped (first occurrence wins). Canonical form makes clause identity a
//! string comparison, which the saturation loop and certificate replay both
//! lean on.

use crate::logic::subst::Subst;
use crate::logic::term::Term;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A possibly negated atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub positive: bool,
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(positive: bool, predicate: impl Into<String>, args: Vec<Term>) -> Literal {
        Literal {
            positive,
            predicate: predicate.into(),
            args,
        }
    }

    pub fn negated(&self) -> Literal {
        Literal {
            positive: !self.positive,
            predicate: self.predicate.clone(),
            args: self.args.clone(),
        }
    }

    /// Same predicate and polarity; the precondition for factoring.
    pub fn same_shape(&self, other: &Literal) -> bool {
        self.positive == other.positive && self.predicate == other.predicate
    }

    pub fn weight(&self) -> u64 {
        1 + self.args.iter().map(|t| t.symbol_count() as u64).sum::<u64>()
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        for arg in &self.args {
            arg.collect_vars(out);
        }
    }

    pub fn apply(&self, subst: &Subst) -> Literal {
        Literal {
            positive: self.positive,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| subst.resolve(a)).collect(),
        }
    }

    fn rename(&self, map: &BTreeMap<String, String>) -> Literal {
        fn go(t: &Term, map: &BTreeMap<String, String>) -> Term {
            match t {
                Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
                Term::App(f, args) => {
                    Term::App(f.clone(), args.iter().map(|a| go(a, map)).collect())
                }
            }
        }
        Literal {
            positive: self.positive,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| go(a, map)).collect(),
        }
    }

    /// Bit index for the subsumption prefilter.
    fn mask_bit(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.positive.hash(&mut h);
        self.predicate.hash(&mut h);
        1u64 << (h.finish() % 64)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "~")?;
        }
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Where a clause came from. Part of certificate identity: replay matches
/// inputs on content *and* origin.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClauseOrigin {
    /// A selected library fact, by name.
    Premise(String),
    /// A hypothesis of the goal, by name.
    Hypothesis(String),
    NegatedGoal,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Literal>,
    pub origin: ClauseOrigin,
}

impl Clause {
    /// Canonicalize: rename variables to `X0, X1, ...` in first-occurrence
    /// order, then drop exact-duplicate literals keeping the first.
    pub fn new(literals: Vec<Literal>, origin: ClauseOrigin) -> Clause {
        let mut vars = Vec::new();
        for lit in &literals {
            lit.collect_vars(&mut vars);
        }
        let map: BTreeMap<String, String> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), format!("X{i}")))
            .collect();
        let mut out: Vec<Literal> = Vec::with_capacity(literals.len());
        for lit in &literals {
            let renamed = lit.rename(&map);
            if !out.contains(&renamed) {
                out.push(renamed);
            }
        }
        Clause {
            literals: out,
            origin,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Contains `p` and `~p` on identical arguments.
    pub fn is_tautology(&self) -> bool {
        self.literals.iter().any(|l| {
            !l.positive
                && self
                    .literals
                    .iter()
                    .any(|m| m.positive && m.predicate == l.predicate && m.args == l.args)
        })
    }

    /// Symbol-occurrence count: one per predicate, function, and variable
    /// occurrence. The passive-queue priority.
    pub fn weight(&self) -> u64 {
        self.literals.iter().map(|l| l.weight()).sum()
    }

    /// Identity string; canonical form makes this injective up to renaming.
    pub fn canonical_string(&self) -> String {
        if self.literals.is_empty() {
            return "$false".into();
        }
        let parts: Vec<String> = self.literals.iter().map(|l| l.to_string()).collect();
        parts.join(" | ")
    }

    /// One bit per (polarity, predicate) pair; `C` can subsume `D` only if
    /// `mask(C) & !mask(D) == 0`.
    pub fn mask(&self) -> u64 {
        self.literals.iter().map(|l| l.mask_bit()).fold(0, |a, b| a | b)
    }

    /// Rename variables through `f` by canonical index (`X<k>` maps to
    /// `f(k)`); used to standardize resolution parents apart.
    pub fn rename_vars(&self, f: impl Fn(usize) -> String) -> Vec<Literal> {
        let mut vars = Vec::new();
        for lit in &self.literals {
            lit.collect_vars(&mut vars);
        }
        let map: BTreeMap<String, String> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), f(i)))
            .collect();
        self.literals.iter().map(|l| l.rename(&map)).collect()
    }

    /// Subsumption restricted to `|C| <= |D|`: some substitution maps every
    /// literal of `self` onto a literal of `other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        if self.literals.len() > other.literals.len() {
            return false;
        }
        // Unit fast path: one literal, try each target directly.
        if self.literals.len() == 1 {
            let lit = &self.literals[0];
            return other.literals.iter().any(|t| {
                lit.positive == t.positive
                    && lit.predicate == t.predicate
                    && Subst::default().match_all(&lit.args, &t.args)
            });
        }
        fn go(pattern: &[Literal], target: &[Literal], i: usize, subst: &Subst) -> bool {
            if i == pattern.len() {
                return true;
            }
            let lit = &pattern[i];
            for t in target {
                if lit.positive != t.positive || lit.predicate != t.predicate {
                    continue;
                }
                // Matching mutates; branch on a clone for rollback.
                let mut attempt = subst.clone();
                if attempt.match_all(&lit.args, &t.args) && go(pattern, target, i + 1, &attempt) {
                    return true;
                }
            }
            false
        }
        go(&self.literals, &other.literals, 0, &Subst::default())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}
