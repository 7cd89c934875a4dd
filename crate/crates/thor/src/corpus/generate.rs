//! Deterministic synthetic theory generator.
//!
//! Each theory gets a namespaced signature over a shared constant pool and
//! three theorem families:
//!
//! - structural: tautology-shaped statements with tactic-only proofs;
//! - premise-heavy: chain/join consequences finished by `apply` sequences,
//!   a fraction of which end in a planted certificate step;
//! - composite: a disjunctive or existential obstacle mentioning the
//!   theory's `trap` predicate in front of an `hfin` finish.
//!
//! `trap` is reachable only through a noise kit (the "grinder") that
//! self-multiplies under resolution: units `w0(gd_i)`, two webs
//! `w{k}(x) -> w{k}(y) -> w{k+1}(gf(x,y))`, and per-theory entries
//! `w2(x) -> blocked(x) -> trap(x)` with `blocked` unsupported everywhere.
//! Premise selection pulls the grinder exactly when `trap` is in the goal's
//! symbol closure, and the cross products it generates all sit below the
//! weight of the `hfin` rule, so the prover starves before the real
//! refutation starts. Trap-free goals never select the kit and stay cheap.
//! Every fact is true in one finite model over domain {0,1,2}, which all
//! tables here are built against and asserted on.

use super::datapoint::{datapoints_of, Datapoint};
use super::split::SplitInfo;
use super::Corpus;
use crate::hammer::run::{hammer, HammerBudget};
use crate::logic::goal::{Goal, ProofState, Theorem, TheoremLibrary};
use crate::logic::kernel::{apply_step, check_proof, is_proved};
use crate::logic::model::{FiniteModel, FuncTable, PredTable};
use crate::logic::parse::{parse_formula, parse_step};
use crate::logic::step::ProofStep;
use crate::logic::term::Signature;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorProfile {
    /// Unary predicates q0..q{n-1} per theory; chains feed q{n-1} via a
    /// two-antecedent join rule.
    pub chain_preds: usize,
    /// Constants c0..c{m-1} per theory; composite slot j owns c{j}. Keeping
    /// them theory-local stops other theories' seed facts from sharing
    /// symbols with a goal, which would crowd premise selection.
    pub theory_constants: usize,
    /// Grinder seed constants gd_0..gd_{k-1}; the flood volume is roughly
    /// the fourth power of this count.
    pub grinder_units: usize,
    /// Theorems per theory by family: (structural, premise-heavy, composite).
    pub family_mix: (usize, usize, usize),
    /// Upper bound on ground-truth proof length.
    pub max_proof_depth: usize,
    /// Fraction of premise-heavy proofs cut over to a certificate finish.
    pub by_cert_tail_fraction: f64,
    /// Inference budget for planting certificate steps (the in-search cap,
    /// so planted steps stay hammer-solvable at every larger budget).
    pub plant_inferences: u64,
    /// Budget at which composite roots must NOT be hammer-provable.
    pub honesty_inferences: u64,
    pub honesty_retries: u32,
}

impl Default for GeneratorProfile {
    fn default() -> GeneratorProfile {
        GeneratorProfile {
            chain_preds: 8,
            theory_constants: 9,
            grinder_units: 28,
            family_mix: (12, 9, 9),
            max_proof_depth: 12,
            by_cert_tail_fraction: 0.35,
            plant_inferences: 5_000,
            honesty_inferences: 50_000,
            honesty_retries: 8,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    /// Every retry of a theory tripped an honesty check (a planted step was
    /// not provable at the plant budget, or a root fell to the hammer).
    /// Deterministic for a given seed, library shape, and profile.
    #[error("theory {theory}: honesty checks failed after retries: {detail}")]
    Honesty { theory: usize, detail: String },
}

const DOMAIN_SIZE: usize = 3;

/// Proof plans mix literal tactics with generation-time hammer calls that
/// become `by_cert` steps.
enum PlannedStep {
    Tactic(String),
    /// Close exactly the first open goal with a planted certificate.
    HammerGoal,
    /// Close every remaining goal with planted certificates.
    HammerFinish,
}

pub fn generate_corpus(
    seed: u64,
    n_theories: usize,
    theorems_per_theory: usize,
    profile: &GeneratorProfile,
) -> Result<Corpus, GenerateError> {
    validate_profile(profile, n_theories, theorems_per_theory)?;

    let library = build_library(n_theories, profile);
    let model = build_model(n_theories, profile);
    model.validate().expect("generated model is total");
    for (name, fact) in library.iter() {
        assert!(
            model.eval_closed(fact).unwrap_or(false),
            "library fact {name} is false in the intended model"
        );
    }

    let theorems: Vec<Theorem> = (0..n_theories)
        .into_par_iter()
        .map(|t| build_theory_theorems(seed, t, &library, profile))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();

    for thm in &theorems {
        assert!(
            model.eval_closed(&thm.statement).unwrap_or(false),
            "theorem {} is false in the intended model",
            thm.name
        );
        check_proof(&library, &thm.statement, &thm.ground_truth_proof)
            .unwrap_or_else(|e| panic!("ground-truth proof of {} fails: {e}", thm.name));
    }

    let mut datapoints: Vec<Datapoint> = Vec::new();
    for thm in &theorems {
        datapoints.extend(
            datapoints_of(thm, &library)
                .unwrap_or_else(|e| panic!("replay of {} fails: {e}", thm.name)),
        );
    }

    let names: Vec<String> = theorems.iter().map(|t| t.name.clone()).collect();
    Ok(Corpus {
        library,
        theorems,
        datapoints,
        split: SplitInfo::all_train(names),
        model,
    })
}

fn validate_profile(
    p: &GeneratorProfile,
    n_theories: usize,
    theorems_per_theory: usize,
) -> Result<(), GenerateError> {
    let fail = |m: String| Err(GenerateError::InvalidProfile(m));
    if n_theories == 0 || theorems_per_theory == 0 {
        return fail("need at least one theory and one theorem".into());
    }
    let (st, pr, co) = p.family_mix;
    if st + pr + co != theorems_per_theory {
        return fail(format!(
            "family mix {:?} must sum to theorems_per_theory ({theorems_per_theory})",
            p.family_mix
        ));
    }
    if p.chain_preds < 5 {
        return fail("chain_preds must be at least 5".into());
    }
    if p.theory_constants < 3 {
        return fail("theory_constants must be at least 3".into());
    }
    if co > p.theory_constants {
        return fail("each composite slot needs its own shared constant".into());
    }
    if pr > (p.chain_preds - 3) * p.theory_constants {
        return fail("not enough distinct premise-heavy statements".into());
    }
    if p.grinder_units < 8 {
        return fail("grinder_units must be at least 8".into());
    }
    if !(0.0..=1.0).contains(&p.by_cert_tail_fraction) {
        return fail("by_cert_tail_fraction must lie in [0, 1]".into());
    }
    // Longest plan: join route = apply + (jx chain) + (jy chain) + 2 assumptions.
    let longest = 3 + (p.chain_preds / 4) + (p.chain_preds - 3);
    if longest > p.max_proof_depth {
        return fail(format!(
            "max_proof_depth {} cannot hold the longest premise plan ({longest})",
            p.max_proof_depth
        ));
    }
    if p.plant_inferences == 0 || p.honesty_inferences == 0 {
        return fail("budgets must be positive".into());
    }
    Ok(())
}

fn prefix(t: usize) -> String {
    format!("t{t}_")
}

/// T2/T3 composite slots carry a per-theorem constant.
fn slot_has_cc(slot: usize) -> bool {
    matches!(slot % 4, 1 | 2)
}

fn build_signature(n_theories: usize, p: &GeneratorProfile) -> Signature {
    let mut sig = Signature::default();
    for w in ["w0", "w1", "w2", "blocked"] {
        sig.declare_predicate(w, 1).unwrap();
    }
    sig.declare_function("gf", 2).unwrap();
    for i in 0..p.grinder_units {
        sig.declare_function(format!("gd{i}"), 0).unwrap();
    }
    for t in 0..n_theories {
        let tp = prefix(t);
        for i in 0..p.theory_constants {
            sig.declare_function(format!("{tp}c{i}"), 0).unwrap();
        }
        for k in 0..p.chain_preds {
            sig.declare_predicate(format!("{tp}q{k}"), 1).unwrap();
        }
        for a in 1..=4 {
            sig.declare_predicate(format!("{tp}s{a}"), 1).unwrap();
        }
        sig.declare_predicate(format!("{tp}hfin"), 1).unwrap();
        sig.declare_predicate(format!("{tp}trap"), 1).unwrap();
        for j in 0..p.family_mix.2 {
            sig.declare_predicate(format!("{tp}pk{j}"), 1).unwrap();
            if slot_has_cc(j) {
                sig.declare_function(format!("{tp}cc{j}"), 0).unwrap();
            }
        }
    }
    sig
}

fn build_library(n_theories: usize, p: &GeneratorProfile) -> TheoremLibrary {
    let mut lib = TheoremLibrary::new(build_signature(n_theories, p));
    let add = |lib: &mut TheoremLibrary, name: String, text: String| {
        let f = parse_formula(&text)
            .unwrap_or_else(|e| panic!("generator produced unparseable fact {name}: {e}"));
        lib.add_fact(name, f).expect("generator facts are unique and well-formed");
    };

    // Core facts first, for every theory: MePo's zero-score fill is broken
    // by insertion order, so noise must come after ALL core facts.
    let n = p.chain_preds;
    let (jx, jy) = (n / 4, n - 3);
    for t in 0..n_theories {
        let tp = prefix(t);
        for i in 0..p.theory_constants {
            add(
                &mut lib,
                format!("{tp}seed_q0_c{i}"),
                format!("{tp}q0({tp}c{i})"),
            );
        }
        for k in 0..n - 2 {
            add(
                &mut lib,
                format!("{tp}chain{k}"),
                format!("forall x. {tp}q{k}(x) -> {tp}q{}(x)", k + 1),
            );
        }
        add(
            &mut lib,
            format!("{tp}join"),
            format!("forall x. {tp}q{jx}(x) -> {tp}q{jy}(x) -> {tp}q{}(x)", n - 1),
        );
        add(
            &mut lib,
            format!("{tp}heavy"),
            format!(
                "forall x. {tp}s1(x) -> {tp}s2(x) -> {tp}s3(x) -> {tp}s4(x) -> {tp}hfin(x)"
            ),
        );
        for a in 1..=4 {
            for i in 0..p.theory_constants {
                add(
                    &mut lib,
                    format!("{tp}seed_s{a}_c{i}"),
                    format!("{tp}s{a}({tp}c{i})"),
                );
            }
        }
        for j in 0..p.family_mix.2 {
            add(
                &mut lib,
                format!("{tp}seed_pk{j}"),
                format!("{tp}pk{j}({tp}c{j})"),
            );
            if slot_has_cc(j) {
                // s1 is deliberately missing at cc{j}: only a hypothesis can
                // supply it, which gates certificate reuse across theorems.
                for a in 2..=4 {
                    add(
                        &mut lib,
                        format!("{tp}seed_s{a}_cc{j}"),
                        format!("{tp}s{a}({tp}cc{j})"),
                    );
                }
            }
        }
    }

    // Noise kit, after every core fact.
    for i in 0..p.grinder_units {
        add(&mut lib, format!("noise_unit{i}"), format!("w0(gd{i})"));
    }
    add(
        &mut lib,
        "noise_web1".into(),
        "forall x. forall y. w0(x) -> w0(y) -> w1(gf(x,y))".into(),
    );
    add(
        &mut lib,
        "noise_web2".into(),
        "forall x. forall y. w1(x) -> w1(y) -> w2(gf(x,y))".into(),
    );
    for t in 0..n_theories {
        let tp = prefix(t);
        add(
            &mut lib,
            format!("{tp}trap_entry"),
            format!("forall x. w2(x) -> blocked(x) -> {tp}trap(x)"),
        );
    }
    lib
}

fn build_model(n_theories: usize, p: &GeneratorProfile) -> FiniteModel {
    let all = || PredTable {
        arity: 1,
        true_tuples: (0..DOMAIN_SIZE).map(|d| vec![d]).collect(),
    };
    let none = || PredTable {
        arity: 1,
        true_tuples: BTreeSet::new(),
    };
    let constant = |v: usize| FuncTable {
        arity: 0,
        entries: vec![(vec![], v % DOMAIN_SIZE)],
    };

    let mut m = FiniteModel {
        domain_size: DOMAIN_SIZE,
        predicates: Default::default(),
        functions: Default::default(),
    };
    for i in 0..p.grinder_units {
        m.functions.insert(format!("gd{i}"), constant(i));
    }
    let mut gf = Vec::new();
    for x in 0..DOMAIN_SIZE {
        for y in 0..DOMAIN_SIZE {
            gf.push((vec![x, y], (x + 2 * y + 1) % DOMAIN_SIZE));
        }
    }
    gf.sort();
    m.functions.insert("gf".into(), FuncTable { arity: 2, entries: gf });
    for w in ["w0", "w1", "w2"] {
        m.predicates.insert(w.into(), all());
    }
    m.predicates.insert("blocked".into(), none());

    for t in 0..n_theories {
        let tp = prefix(t);
        for i in 0..p.theory_constants {
            m.functions.insert(format!("{tp}c{i}"), constant(i));
        }
        for k in 0..p.chain_preds {
            m.predicates.insert(format!("{tp}q{k}"), all());
        }
        for a in 1..=4 {
            m.predicates.insert(format!("{tp}s{a}"), all());
        }
        m.predicates.insert(format!("{tp}hfin"), all());
        m.predicates.insert(format!("{tp}trap"), none());
        for j in 0..p.family_mix.2 {
            m.predicates.insert(
                format!("{tp}pk{j}"),
                PredTable {
                    arity: 1,
                    true_tuples: [vec![j % DOMAIN_SIZE]].into_iter().collect(),
                },
            );
            if slot_has_cc(j) {
                m.functions.insert(format!("{tp}cc{j}"), constant(j));
            }
        }
    }
    m
}

/// Theory seeds are derived from the master seed by index (and retry round),
/// so theories generate independently and in parallel.
fn theory_rng(seed: u64, theory: usize, retry: u32) -> ChaCha8Rng {
    let idx = (theory as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ChaCha8Rng::seed_from_u64(seed ^ idx ^ ((retry as u64) << 56))
}

fn build_theory_theorems(
    seed: u64,
    t: usize,
    library: &TheoremLibrary,
    p: &GeneratorProfile,
) -> Result<Vec<Theorem>, GenerateError> {
    let mut last_err = String::new();
    for retry in 0..=p.honesty_retries {
        let mut rng = theory_rng(seed, t, retry);
        match try_build_theory(t, library, p, &mut rng) {
            Ok(theorems) => return Ok(theorems),
            Err(e) => last_err = e,
        }
    }
    Err(GenerateError::Honesty {
        theory: t,
        detail: last_err,
    })
}

fn try_build_theory(
    t: usize,
    library: &TheoremLibrary,
    p: &GeneratorProfile,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Theorem>, String> {
    let mut out = Vec::new();
    let (n_str, n_prem, n_comp) = p.family_mix;

    for (i, (stmt, steps)) in structural_statements(t, p, n_str, rng).into_iter().enumerate() {
        let plan = steps.into_iter().map(PlannedStep::Tactic).collect();
        out.push(realize(library, format!("t{t}_str{i}"), &stmt, plan, p)?);
    }
    for (i, (stmt, plan)) in premise_plans(t, p, n_prem, rng).into_iter().enumerate() {
        out.push(realize(library, format!("t{t}_prem{i}"), &stmt, plan, p)?);
    }
    let honesty = HammerBudget {
        max_selected_premises: 128,
        max_inferences: p.honesty_inferences,
        wallclock_secs: None,
    };
    for (j, (stmt, plan)) in composite_plans(t, n_comp).into_iter().enumerate() {
        let thm = realize(library, format!("t{t}_comp{j}"), &stmt, plan, p)?;
        let root = Goal {
            hypotheses: Vec::new(),
            conclusion: thm.statement.clone(),
        };
        if hammer(library, &root, &honesty).proved() {
            return Err(format!("composite {} is hammer-provable at the honesty budget", thm.name));
        }
        out.push(thm);
    }
    Ok(out)
}

/// Parse the statement, execute the plan (planting certificates at hammer
/// positions), and package the theorem.
fn realize(
    library: &TheoremLibrary,
    name: String,
    statement: &str,
    plan: Vec<PlannedStep>,
    p: &GeneratorProfile,
) -> Result<Theorem, String> {
    let statement = parse_formula(statement)
        .map_err(|e| format!("{name}: unparseable statement `{statement}`: {e}"))?;
    let plant = HammerBudget {
        max_selected_premises: 128,
        max_inferences: p.plant_inferences,
        wallclock_secs: None,
    };
    let mut state = ProofState::initial(&statement);
    let mut steps: Vec<ProofStep> = Vec::new();
    let mut push = |state: &mut ProofState, step: ProofStep| -> Result<(), String> {
        *state = apply_step(library, state, &step)
            .map_err(|e| format!("{name}: step `{step}` fails: {e}"))?;
        steps.push(step);
        Ok(())
    };
    for planned in plan {
        match planned {
            PlannedStep::Tactic(text) => {
                let step = parse_step(&text).map_err(|e| format!("{name}: `{text}`: {e}"))?;
                push(&mut state, step)?;
            }
            PlannedStep::HammerGoal => plant_one(library, &mut state, &plant, &mut push)?,
            PlannedStep::HammerFinish => {
                while !is_proved(&state) {
                    plant_one(library, &mut state, &plant, &mut push)?;
                }
            }
        }
    }
    if !is_proved(&state) {
        return Err(format!("{name}: plan left goals open"));
    }
    if steps.len() > p.max_proof_depth {
        return Err(format!("{name}: proof exceeds max depth"));
    }
    Ok(Theorem {
        name,
        statement,
        ground_truth_proof: steps,
    })
}

fn plant_one(
    library: &TheoremLibrary,
    state: &mut ProofState,
    plant: &HammerBudget,
    push: &mut impl FnMut(&mut ProofState, ProofStep) -> Result<(), String>,
) -> Result<(), String> {
    let goal = state.first_goal().ok_or("no goal to hammer")?.clone();
    let outcome = hammer(library, &goal, plant);
    if !outcome.proved() {
        return Err(format!(
            "planting failed: goal `{goal}` not hammer-provable at the plant budget"
        ));
    }
    push(state, outcome.to_step().expect("proved outcomes carry a step"))
}

/// Tautology-shaped statements with fixed tactic scripts, instantiated with
/// random ground q-atoms (all true in the model, so any negation-free shape
/// is true too).
fn structural_statements(
    t: usize,
    p: &GeneratorProfile,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(String, Vec<String>)> {
    let tp = prefix(t);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut guard = 0;
    while out.len() < count {
        guard += 1;
        assert!(guard < 10_000, "structural dedup cannot fill the quota");
        let k1 = rng.gen_range(0..p.chain_preds);
        let k2 = rng.gen_range(0..p.chain_preds);
        let k3 = rng.gen_range(0..p.chain_preds);
        let i1 = rng.gen_range(0..p.theory_constants);
        let i2 = rng.gen_range(0..p.theory_constants);
        let i3 = rng.gen_range(0..p.theory_constants);
        let a = format!("{tp}q{k1}({tp}c{i1})");
        let b = format!("{tp}q{k2}({tp}c{i2})");
        let c = format!("{tp}q{k3}({tp}c{i3})");
        let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let (stmt, steps) = match rng.gen_range(0..11u32) {
            0 => (format!("{a} -> {a}"), s(&["intro", "assumption"])),
            1 => (
                format!("{a} -> {b} -> {a}"),
                s(&["intro", "intro", "assumption"]),
            ),
            2 => (
                format!("{a} & {b} -> {a}"),
                s(&["intro", "destruct h0", "assumption"]),
            ),
            3 => (
                format!("{a} & {b} -> {b} & {a}"),
                s(&["intro", "destruct h0", "split", "assumption", "assumption"]),
            ),
            4 => (
                format!("{a} -> {a} | {b}"),
                s(&["intro", "left", "assumption"]),
            ),
            5 => (
                format!("{a} | {b} -> {b} | {a}"),
                s(&["intro", "cases h0", "right", "assumption", "left", "assumption"]),
            ),
            6 => (
                format!("{a} & ({b} & {c}) -> {c}"),
                s(&["intro", "destruct h0", "destruct h2", "assumption"]),
            ),
            7 => (
                format!("{a} -> {b} -> {a} & {b}"),
                s(&["intro", "intro", "split", "assumption", "assumption"]),
            ),
            8 => (
                format!("forall x. {tp}q{k1}(x) -> {tp}q{k1}(x)"),
                s(&["intro", "intro", "assumption"]),
            ),
            9 => (
                format!("{a} | ({b} & {c}) -> {a} | {b}"),
                s(&[
                    "intro",
                    "cases h0",
                    "left",
                    "assumption",
                    "destruct h0",
                    "right",
                    "assumption",
                ]),
            ),
            // q0 is seeded at every theory constant, so `assumption` closes
            // the witness instance against the library.
            _ => (
                format!("exists x. {tp}q0(x) | {tp}q{k1}(x)"),
                vec![
                    format!("exists {tp}c{i1}"),
                    "left".into(),
                    "assumption".into(),
                ],
            ),
        };
        let key = parse_formula(&stmt).expect("structural template parses").to_string();
        if seen.insert(key) {
            out.push((stmt, steps));
        }
    }
    out
}

/// Backward-chain plans for `q_k(c_i)` statements; some are cut over to a
/// certificate finish partway through.
fn premise_plans(
    t: usize,
    p: &GeneratorProfile,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(String, Vec<PlannedStep>)> {
    let tp = prefix(t);
    let n = p.chain_preds;
    let (jx, jy) = (n / 4, n - 3);
    let mut combos: Vec<(usize, usize)> = (3..n)
        .flat_map(|k| (0..p.theory_constants).map(move |i| (k, i)))
        .collect();
    combos.shuffle(rng);
    combos.truncate(count);

    let chain_route = |from: usize, i: usize| -> Vec<String> {
        let mut steps: Vec<String> = (0..from)
            .rev()
            .map(|b| format!("apply {tp}chain{b}"))
            .collect();
        steps.push("assumption".into());
        let _ = i;
        steps
    };

    combos
        .into_iter()
        .map(|(k, i)| {
            let stmt = format!("{tp}q{k}({tp}c{i})");
            let mut tactics: Vec<String> = Vec::new();
            if k == n - 1 {
                // q{n-1} is reachable only through the join rule.
                tactics.push(format!("apply {tp}join"));
                tactics.extend(chain_route(jx, i));
                tactics.extend(chain_route(jy, i));
            } else {
                tactics.extend(chain_route(k, i));
            }
            let mut plan: Vec<PlannedStep> =
                tactics.into_iter().map(PlannedStep::Tactic).collect();
            if rng.gen_bool(p.by_cert_tail_fraction) {
                let cut = rng.gen_range(0..plan.len());
                plan.truncate(cut);
                plan.push(PlannedStep::HammerFinish);
            }
            (stmt, plan)
        })
        .collect()
}

/// The four composite templates, one per slot, cycling T1..T4. Every
/// template ends in an `hfin` obligation that only the heavy rule proves,
/// and keeps `trap` in scope until a structural step removes it.
fn composite_plans(t: usize, count: usize) -> Vec<(String, Vec<PlannedStep>)> {
    let tp = prefix(t);
    (0..count)
        .map(|j| {
            let trap = format!("(exists x. {tp}trap(x))");
            match j % 4 {
                0 => (
                    format!("{trap} | ({tp}pk{j}({tp}c{j}) & {tp}hfin({tp}c{j}))"),
                    vec![
                        PlannedStep::Tactic("right".into()),
                        PlannedStep::Tactic("split".into()),
                        PlannedStep::HammerGoal,
                        PlannedStep::HammerGoal,
                    ],
                ),
                1 => (
                    format!("{trap} | ({tp}s1({tp}cc{j}) -> {tp}hfin({tp}cc{j}))"),
                    vec![
                        PlannedStep::Tactic("right".into()),
                        PlannedStep::Tactic("intro".into()),
                        PlannedStep::HammerGoal,
                    ],
                ),
                2 => (
                    format!("{tp}s1({tp}cc{j}) -> ({trap} | {tp}hfin({tp}cc{j}))"),
                    vec![
                        PlannedStep::Tactic("intro".into()),
                        PlannedStep::Tactic("right".into()),
                        PlannedStep::HammerGoal,
                    ],
                ),
                _ => (
                    format!("exists y. {tp}pk{j}(y) & ({trap} | {tp}hfin(y))"),
                    vec![
                        PlannedStep::Tactic(format!("exists {tp}c{j}")),
                        PlannedStep::Tactic("split".into()),
                        PlannedStep::HammerGoal,
                        PlannedStep::Tactic("right".into()),
                        PlannedStep::HammerGoal,
                    ],
                ),
            }
        })
        .collect()
}

/// Scaled-down profile for tests across the crate. Three theories keep the
/// core fact block larger than the premise cap, mirroring the full-size
/// corpus; the honesty budget shrinks with the grinder so the checks stay
/// cheap but still bind.
#[cfg(test)]
pub(crate) fn tiny_test_profile() -> GeneratorProfile {
    GeneratorProfile {
        family_mix: (2, 2, 2),
        grinder_units: 8,
        honesty_inferences: 3_000,
        ..GeneratorProfile::default()
    }
}

/// One shared tiny corpus per test binary; generation dominates the cost of
/// every test that needs realistic theorems.
#[cfg(test)]
pub(crate) fn shared_tiny_corpus() -> &'static Corpus {
    use std::sync::OnceLock;
    static TINY: OnceLock<Corpus> = OnceLock::new();
    TINY.get_or_init(|| generate_corpus(11, 3, 6, &tiny_test_profile()).expect("tiny corpus generates"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::split::SplitLabel;
    use crate::logic::step::ProofStep;

    fn tiny_profile() -> GeneratorProfile {
        tiny_test_profile()
    }

    #[test]
    fn exhausted_honesty_retries_surface_as_an_error() {
        // One inference can never plant a certificate, so every retry of
        // every theory fails and the failure must come back as a value.
        let profile = GeneratorProfile {
            plant_inferences: 1,
            honesty_retries: 1,
            ..tiny_profile()
        };
        match generate_corpus(1, 3, 6, &profile) {
            Err(GenerateError::Honesty { .. }) => {}
            other => panic!("expected an honesty error, got {other:?}"),
        }
    }

    #[test]
    fn tiny_corpus_is_deterministic() {
        let a = generate_corpus(1, 3, 6, &tiny_profile()).unwrap();
        let b = generate_corpus(1, 3, 6, &tiny_profile()).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = generate_corpus(2, 3, 6, &tiny_profile()).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn families_have_their_shapes() {
        let corpus = generate_corpus(7, 3, 6, &tiny_profile()).unwrap();
        assert_eq!(corpus.theorems.len(), 18);
        // Structural proofs never cite facts; composites end in by_cert.
        for thm in &corpus.theorems {
            if thm.name.contains("_str") {
                assert!(thm
                    .ground_truth_proof
                    .iter()
                    .all(|s| s.cited_premises().is_empty()));
            }
            if thm.name.contains("_comp") {
                assert!(matches!(
                    thm.ground_truth_proof.last(),
                    Some(ProofStep::ByCertificate(_))
                ));
            }
        }
        // All-train split by default; datapoints replay to completion.
        assert!(corpus
            .split
            .assignment
            .values()
            .all(|l| *l == SplitLabel::Train));
        assert!(!corpus.datapoints.is_empty());
        for dp in &corpus.datapoints {
            dp.validate().unwrap();
        }
    }

    #[test]
    fn rejects_inconsistent_profiles() {
        let p = tiny_profile();
        assert!(generate_corpus(1, 3, 7, &p).is_err());
        let bad = GeneratorProfile {
            family_mix: (0, 0, 12),
            ..GeneratorProfile::default()
        };
        // 12 composite slots need 12 theory constants; the default has 9.
        assert!(generate_corpus(1, 1, 12, &bad).is_err());
    }

    #[test]
    fn composite_roots_resist_the_hammer_but_tails_are_planted() {
        let profile = tiny_profile();
        let corpus = generate_corpus(11, 3, 6, &profile).unwrap();
        let honesty = HammerBudget {
            max_selected_premises: 128,
            max_inferences: profile.honesty_inferences,
            wallclock_secs: None,
        };
        for comp in corpus.theorems.iter().filter(|t| t.name.contains("_comp")) {
            let root = Goal {
                hypotheses: Vec::new(),
                conclusion: comp.statement.clone(),
            };
            assert!(
                !hammer(&corpus.library, &root, &honesty).proved(),
                "{} fell to the hammer",
                comp.name
            );
        }
    }
}
