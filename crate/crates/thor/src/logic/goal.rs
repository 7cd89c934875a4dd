//! Goals, proof states, theorems, and the fact library.

use super::formula::Formula;
use super::step::ProofStep;
use super::term::Signature;
use indexmap::IndexMap;

/// One open obligation: named hypotheses and a conclusion, all closed
/// formulas over the base + local signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub hypotheses: Vec<(String, Formula)>,
    pub conclusion: Formula,
}

impl Goal {
    pub fn hypothesis(&self, name: &str) -> Option<&Formula> {
        self.hypotheses
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
    }

    /// Hypotheses and conclusion, conclusion last.
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.hypotheses
            .iter()
            .map(|(_, f)| f)
            .chain(std::iter::once(&self.conclusion))
    }
}

/// The kernel's state: open goals (first goal is the active one), constants
/// introduced so far, and how many steps produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofState {
    pub goals: Vec<Goal>,
    pub local_signature: Signature,
    pub step_count: u32,
}

impl ProofState {
    pub fn initial(statement: &Formula) -> ProofState {
        ProofState {
            goals: vec![Goal {
                hypotheses: Vec::new(),
                conclusion: statement.clone(),
            }],
            local_signature: Signature::default(),
            step_count: 0,
        }
    }

    pub fn first_goal(&self) -> Option<&Goal> {
        self.goals.first()
    }

    /// Canonical serialization; the search's duplicate key and the datapoint
    /// `proof_state` field. Empty for a fully proved state.
    pub fn canonical_string(&self) -> String {
        self.to_string()
    }

    /// Next unused `h<k>` index across all goals.
    pub fn fresh_hypothesis_index(&self) -> u32 {
        let mut next = 0u32;
        for g in &self.goals {
            for (name, _) in &g.hypotheses {
                if let Some(k) = name.strip_prefix('h').and_then(|s| s.parse::<u32>().ok()) {
                    next = next.max(k + 1);
                }
            }
        }
        next
    }

    pub fn fresh_hypothesis_name(&self) -> String {
        format!("h{}", self.fresh_hypothesis_index())
    }

    /// Next unused `_c<k>` given the base signature.
    pub fn fresh_constant_name(&self, base: &Signature) -> String {
        let mut next = 0u32;
        for name in self
            .local_signature
            .functions
            .keys()
            .chain(base.functions.keys())
        {
            if let Some(k) = name.strip_prefix("_c").and_then(|s| s.parse::<u32>().ok()) {
                next = next.max(k + 1);
            }
        }
        format!("_c{next}")
    }
}

/// A named closed statement with the generator's tactic proof.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem {
    pub name: String,
    pub statement: Formula,
    pub ground_truth_proof: Vec<ProofStep>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LibraryError {
    #[error("duplicate fact name `{0}`")]
    DuplicateFact(String),
    #[error("fact `{0}` is not closed")]
    OpenFact(String),
    #[error("fact `{0}` is ill-formed over the library signature")]
    IllFormedFact(String),
}

/// The ambient fact library: a signature plus named closed facts in
/// insertion order. Insertion order is semantically relevant (premise
/// selection tie-breaks).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TheoremLibrary {
    pub signature: Signature,
    facts: IndexMap<String, Formula>,
}

impl TheoremLibrary {
    pub fn new(signature: Signature) -> TheoremLibrary {
        TheoremLibrary {
            signature,
            facts: IndexMap::new(),
        }
    }

    pub fn add_fact(
        &mut self,
        name: impl Into<String>,
        fact: Formula,
    ) -> Result<(), LibraryError> {
        let name = name.into();
        if self.facts.contains_key(&name) {
            return Err(LibraryError::DuplicateFact(name));
        }
        if !fact.is_closed() {
            return Err(LibraryError::OpenFact(name));
        }
        if !fact.well_formed(&self.signature) {
            return Err(LibraryError::IllFormedFact(name));
        }
        self.facts.insert(name, fact);
        Ok(())
    }

    pub fn fact(&self, name: &str) -> Option<&Formula> {
        self.facts.get(name)
    }

    /// Position in insertion order; the premise-selection tie-break.
    pub fn fact_index(&self, name: &str) -> Option<usize> {
        self.facts.get_index_of(name)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Formula)> {
        self.facts.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse_formula;
    use crate::logic::term::Term;

    #[test]
    fn fresh_names_scan_the_state() {
        let statement = parse_formula("p -> p").unwrap();
        let mut state = ProofState::initial(&statement);
        assert_eq!(state.fresh_hypothesis_name(), "h0");
        state.goals[0]
            .hypotheses
            .push(("h0".into(), parse_formula("p").unwrap()));
        state.goals[0]
            .hypotheses
            .push(("h4".into(), parse_formula("p").unwrap()));
        assert_eq!(state.fresh_hypothesis_name(), "h5");

        let base = Signature::default();
        assert_eq!(state.fresh_constant_name(&base), "_c0");
        state
            .local_signature
            .declare_function("_c0", 0)
            .unwrap();
        assert_eq!(state.fresh_constant_name(&base), "_c1");
    }

    #[test]
    fn library_rejects_duplicates_and_open_facts() {
        let mut sig = Signature::default();
        sig.declare_predicate("p", 1).unwrap();
        sig.declare_function("a", 0).unwrap();
        let mut lib = TheoremLibrary::new(sig);
        lib.add_fact("f0", parse_formula("p(a)").unwrap()).unwrap();
        assert_eq!(
            lib.add_fact("f0", parse_formula("p(a)").unwrap()),
            Err(LibraryError::DuplicateFact("f0".into()))
        );
        // A bare variable parses as a constant, so construct an open fact
        // directly.
        let open = Formula::atom("p", vec![Term::var("x")]);
        assert_eq!(
            lib.add_fact("f1", open),
            Err(LibraryError::OpenFact("f1".into()))
        );
        assert_eq!(lib.fact_index("f0"), Some(0));
    }
}
