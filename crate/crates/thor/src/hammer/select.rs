//! Relevance-based premise selection over the fact library.
//!
//! Iterative symbol-overlap scoring: facts scoring above a threshold are
//! pulled in, their symbols join the relevant set, and the threshold decays
//! each round down to a floor. Remaining slots are filled by final score,
//! ties broken by library insertion order — so the head of the library is
//! structurally favored over the tail when nothing distinguishes them.

use crate::logic::goal::{Goal, TheoremLibrary};
use std::collections::BTreeSet;

const INITIAL_THRESHOLD: f64 = 0.6;
const THRESHOLD_DECAY: f64 = 0.9;
const THRESHOLD_FLOOR: f64 = 0.05;
const IRRELEVANCE_PENALTY: f64 = 2.0;

fn score(fact_symbols: &BTreeSet<String>, relevant: &BTreeSet<String>) -> f64 {
    let shared = fact_symbols.intersection(relevant).count() as f64;
    let fresh = fact_symbols.len() as f64 - shared;
    if shared == 0.0 {
        return 0.0;
    }
    shared / (shared + IRRELEVANCE_PENALTY * fresh)
}

/// Select up to `max` premise names for `goal`, most relevant first.
pub fn select_premises(library: &TheoremLibrary, goal: &Goal, max: usize) -> Vec<String> {
    let mut relevant: BTreeSet<String> = BTreeSet::new();
    for f in goal.formulas() {
        relevant.extend(f.symbols().tagged());
    }
    let facts: Vec<(&String, BTreeSet<String>)> = library
        .iter()
        .map(|(name, f)| (name, f.symbols().tagged()))
        .collect();

    let mut selected: Vec<usize> = Vec::new();
    let mut in_selection = vec![false; facts.len()];
    let mut threshold = INITIAL_THRESHOLD;
    loop {
        if selected.len() >= max {
            break;
        }
        let round: Vec<usize> = (0..facts.len())
            .filter(|&i| !in_selection[i] && score(&facts[i].1, &relevant) >= threshold)
            .collect();
        for &i in &round {
            if selected.len() >= max {
                break;
            }
            in_selection[i] = true;
            selected.push(i);
            relevant.extend(facts[i].1.iter().cloned());
        }
        // An empty round at the floor can never change: stop.
        if round.is_empty() && threshold <= THRESHOLD_FLOOR {
            break;
        }
        threshold = (threshold * THRESHOLD_DECAY).max(THRESHOLD_FLOOR);
    }

    // Fill remaining slots by final score, ties by insertion order.
    if selected.len() < max {
        let mut rest: Vec<(usize, f64)> = (0..facts.len())
            .filter(|&i| !in_selection[i])
            .map(|i| (i, score(&facts[i].1, &relevant)))
            .collect();
        rest.sort_by(|(ia, sa), (ib, sb)| sb.total_cmp(sa).then(ia.cmp(ib)));
        for (i, _) in rest {
            if selected.len() >= max {
                break;
            }
            selected.push(i);
        }
    }
    selected.iter().map(|&i| facts[i].0.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse_formula;
    use crate::logic::term::Signature;

    fn library() -> TheoremLibrary {
        let mut sig = Signature::default();
        for p in ["p", "q", "r", "s", "t"] {
            sig.declare_predicate(p, 1).unwrap();
        }
        sig.declare_function("a", 0).unwrap();
        let mut lib = TheoremLibrary::new(sig);
        lib.add_fact("pq", parse_formula("forall x. p(x) -> q(x)").unwrap())
            .unwrap();
        lib.add_fact("qr", parse_formula("forall x. q(x) -> r(x)").unwrap())
            .unwrap();
        lib.add_fact("st", parse_formula("forall x. s(x) -> t(x)").unwrap())
            .unwrap();
        lib.add_fact("pa", parse_formula("p(a)").unwrap()).unwrap();
        lib
    }

    fn goal(conclusion: &str) -> Goal {
        Goal {
            hypotheses: vec![],
            conclusion: parse_formula(conclusion).unwrap(),
        }
    }

    #[test]
    fn relevance_cascades_through_shared_symbols() {
        let lib = library();
        // qr and pa share a symbol with r(a) and join once the threshold
        // decays; their q and p then make pq a perfect match. st never
        // scores and is left out at max 3.
        let picked = select_premises(&lib, &goal("r(a)"), 3);
        assert_eq!(picked, vec!["qr", "pa", "pq"]);
    }

    #[test]
    fn same_round_admissions_keep_insertion_order() {
        let lib = library();
        // st and pa tie in the first admitting round; st was inserted first.
        let picked = select_premises(&lib, &goal("t(a)"), 4);
        assert_eq!(picked[0], "st");
        assert_eq!(picked[1], "pa");
    }

    #[test]
    fn max_truncates_and_fill_completes() {
        let lib = library();
        assert_eq!(select_premises(&lib, &goal("r(a)"), 1), vec!["qr"]);
        // With slack, zero-score facts fill in insertion order.
        let picked = select_premises(&lib, &goal("r(a)"), 10);
        assert_eq!(picked, vec!["qr", "pa", "pq", "st"]);
    }
}
