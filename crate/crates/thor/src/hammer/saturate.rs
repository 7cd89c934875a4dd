//! Given-clause resolution saturation with certificate extraction.
//!
//! Binary resolution plus factoring, lightest clause first (symbol-count
//! weight, FIFO among equals). Forward subsumption only: a new clause is
//! dropped if an active clause subsumes it, and the check is repeated when
//! a clause is popped (the active set has grown since insertion). Every
//! conclusion is constructed by the same `apply_inference` code that
//! certificate replay runs, so an extracted certificate replays exactly.

use super::certificate::{apply_inference, CertInference, CertInput, CertRule, Certificate};
use super::clause::Clause;
use crate::logic::subst::Subst;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaturationStatus {
    /// Empty clause derived; a certificate is attached.
    Proved,
    /// No inferences left; the clause set is satisfiable (given the
    /// calculus' completeness) and no budget was hit.
    Saturated,
    /// Ran out of inferences or wallclock mid-expansion.
    BudgetExhausted,
}

#[derive(Debug)]
pub struct SaturationOutcome {
    pub status: SaturationStatus,
    /// Conclusions produced, kept or not, across the whole run.
    pub inferences_used: u64,
    pub certificate: Option<Certificate>,
}

enum Provenance {
    Input,
    /// Inference with rule indices still in record-id space.
    Inferred(CertInference),
}

struct Saturation {
    clauses: Vec<Clause>,
    provenance: Vec<Provenance>,
    masks: Vec<u64>,
    active: Vec<usize>,
    passive: BinaryHeap<Reverse<(u64, usize)>>,
    seen: HashSet<String>,
    inferences_used: u64,
    max_inferences: u64,
    deadline: Option<Instant>,
}

/// Raised internally to unwind out of the expansion loops.
struct Exhausted;

impl Saturation {
    /// Record a clause and schedule it. Returns its id.
    fn admit(&mut self, clause: Clause, prov: Provenance) -> usize {
        let id = self.clauses.len();
        self.masks.push(clause.mask());
        self.passive.push(Reverse((clause.weight(), id)));
        self.clauses.push(clause);
        self.provenance.push(prov);
        id
    }

    /// Count one produced conclusion against the budget.
    fn charge(&mut self) -> Result<(), Exhausted> {
        if self.inferences_used >= self.max_inferences {
            return Err(Exhausted);
        }
        self.inferences_used += 1;
        if self.inferences_used % 256 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    return Err(Exhausted);
                }
            }
        }
        Ok(())
    }

    fn subsumed_by_active(&self, clause: &Clause, mask: u64) -> bool {
        self.active.iter().any(|&a| {
            self.masks[a] & !mask == 0 && self.clauses[a].subsumes(clause)
        })
    }

    /// Filter a produced conclusion; admits it unless redundant. Returns the
    /// empty clause's id when refutation is reached.
    fn consider(&mut self, clause: Clause, inf: CertInference) -> Option<usize> {
        if clause.is_empty() {
            return Some(self.admit(clause, Provenance::Inferred(inf)));
        }
        if clause.is_tautology() || !self.seen.insert(clause.canonical_string()) {
            return None;
        }
        if self.subsumed_by_active(&clause, clause.mask()) {
            return None;
        }
        self.admit(clause, Provenance::Inferred(inf));
        None
    }

    /// All factorings of the given clause. Returns the empty-clause id if
    /// one closes the proof (it cannot: factors are nonempty — kept for
    /// symmetry with resolution).
    fn factor(&mut self, given: usize) -> Result<Option<usize>, Exhausted> {
        let n = self.clauses[given].literals.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (&self.clauses[given].literals[i], &self.clauses[given].literals[j]);
                if !a.same_shape(b) {
                    continue;
                }
                let mut subst = Subst::new();
                if !subst.unify_all(&a.args, &b.args) {
                    continue;
                }
                self.charge()?;
                let inf = CertInference {
                    rule: CertRule::Factor {
                        parent: given,
                        lit_indices: vec![i, j],
                    },
                    subst: subst.resolved_bindings(),
                };
                let conclusion = apply_inference(&self.clauses, self.clauses.len(), &inf)
                    .expect("factoring conclusion replays");
                if let Some(id) = self.consider(conclusion, inf) {
                    return Ok(Some(id));
                }
            }
        }
        Ok(None)
    }

    /// All resolvents of the given clause against the active set (which
    /// includes the given clause itself). Active parent is `left`.
    fn resolve(&mut self, given: usize) -> Result<Option<usize>, Exhausted> {
        for ai in 0..self.active.len() {
            let left = self.active[ai];
            let lls = self.clauses[left].rename_vars(|k| format!("L{k}"));
            let rls = self.clauses[given].rename_vars(|k| format!("R{k}"));
            for (j, ll) in lls.iter().enumerate() {
                for (i, rl) in rls.iter().enumerate() {
                    if ll.positive == rl.positive || ll.predicate != rl.predicate {
                        continue;
                    }
                    let mut subst = Subst::new();
                    if !subst.unify_all(&ll.args, &rl.args) {
                        continue;
                    }
                    self.charge()?;
                    let inf = CertInference {
                        rule: CertRule::Resolve {
                            left,
                            left_lit: j,
                            right: given,
                            right_lit: i,
                        },
                        subst: subst.resolved_bindings(),
                    };
                    let conclusion = apply_inference(&self.clauses, self.clauses.len(), &inf)
                        .expect("resolution conclusion replays");
                    if let Some(id) = self.consider(conclusion, inf) {
                        return Ok(Some(id));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Walk back from the empty clause and assemble a replayable
    /// certificate, remapping record ids to certificate indices.
    fn extract(&self, empty_id: usize) -> Certificate {
        let mut used: Vec<usize> = Vec::new();
        let mut stack = vec![empty_id];
        let mut seen = HashSet::new();
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            used.push(id);
            if let Provenance::Inferred(inf) = &self.provenance[id] {
                match &inf.rule {
                    CertRule::Resolve { left, right, .. } => {
                        stack.push(*left);
                        stack.push(*right);
                    }
                    CertRule::Factor { parent, .. } => stack.push(*parent),
                }
            }
        }
        // Inputs were all recorded before any inference, so ascending record
        // order is inputs-first and parent-before-child.
        used.sort_unstable();
        let remap: std::collections::HashMap<usize, usize> = used
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let mut inputs = Vec::new();
        let mut inferences = Vec::new();
        for &old in &used {
            match &self.provenance[old] {
                Provenance::Input => inputs.push(CertInput {
                    origin: self.clauses[old].origin.clone(),
                    literals: self.clauses[old].literals.clone(),
                }),
                Provenance::Inferred(inf) => {
                    let rule = match &inf.rule {
                        CertRule::Resolve {
                            left,
                            left_lit,
                            right,
                            right_lit,
                        } => CertRule::Resolve {
                            left: remap[left],
                            left_lit: *left_lit,
                            right: remap[right],
                            right_lit: *right_lit,
                        },
                        CertRule::Factor {
                            parent,
                            lit_indices,
                        } => CertRule::Factor {
                            parent: remap[parent],
                            lit_indices: lit_indices.clone(),
                        },
                    };
                    inferences.push(CertInference {
                        rule,
                        subst: inf.subst.clone(),
                    });
                }
            }
        }
        Certificate::assemble(inputs, inferences)
    }

    fn run(&mut self) -> SaturationOutcome {
        let proved = |s: &Saturation, id: usize| SaturationOutcome {
            status: SaturationStatus::Proved,
            inferences_used: s.inferences_used,
            certificate: Some(s.extract(id)),
        };
        // Inputs may already contain the empty clause.
        if let Some(id) = (0..self.clauses.len()).find(|&i| self.clauses[i].is_empty()) {
            return proved(self, id);
        }
        loop {
            let Some(Reverse((_, given))) = self.passive.pop() else {
                return SaturationOutcome {
                    status: SaturationStatus::Saturated,
                    inferences_used: self.inferences_used,
                    certificate: None,
                };
            };
            // The active set has grown since insertion: re-check.
            if self.subsumed_by_active(&self.clauses[given], self.masks[given]) {
                continue;
            }
            self.active.push(given);
            let expanded = self
                .factor(given)
                .and_then(|hit| match hit {
                    Some(id) => Ok(Some(id)),
                    None => self.resolve(given),
                });
            match expanded {
                Ok(Some(id)) => return proved(self, id),
                Ok(None) => {}
                Err(Exhausted) => {
                    return SaturationOutcome {
                        status: SaturationStatus::BudgetExhausted,
                        inferences_used: self.inferences_used,
                        certificate: None,
                    }
                }
            }
        }
    }
}

/// Saturate `problem`, stopping at `max_inferences` produced conclusions or
/// at `deadline`.
pub fn saturate(
    problem: &[Clause],
    max_inferences: u64,
    deadline: Option<Instant>,
) -> SaturationOutcome {
    let mut sat = Saturation {
        clauses: Vec::new(),
        provenance: Vec::new(),
        masks: Vec::new(),
        active: Vec::new(),
        passive: BinaryHeap::new(),
        seen: HashSet::new(),
        inferences_used: 0,
        max_inferences,
        deadline,
    };
    for clause in problem {
        if clause.is_tautology() {
            continue;
        }
        // Duplicate content keeps only its first origin.
        if !sat.seen.insert(clause.canonical_string()) {
            continue;
        }
        sat.admit(clause.clone(), Provenance::Input);
    }
    sat.run()
}
