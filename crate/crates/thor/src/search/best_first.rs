//! Best-first proof search over kernel states.
//!
//! A priority queue keyed by cumulative log-probability holds open states.
//! Each iteration pops the best node, asks the policy for a batch of
//! candidate steps (one query), and applies each candidate through the
//! kernel. `<hammer>` candidates instead invoke the hammer on the node's
//! state and, on success, advance by the resulting certificate step.
//!
//! Budgets are deterministic costs, not wallclock: a tactic application
//! costs 1, a hammer call its inference count. Optional wallclock mirrors
//! exist for parity with time-budgeted deployments and default off, so a
//! search is a pure function of (statement, policy, config, seed).

use super::trace::TraceEvent;
use crate::corpus::datapoint::HAMMER_TOKEN;
use crate::corpus::CertStore;
use crate::hammer::run::{hammer, HammerBudget};
use crate::logic::formula::Formula;
use crate::logic::goal::{ProofState, TheoremLibrary};
use crate::logic::kernel::{apply_step, check_proof, is_proved};
use crate::logic::parse::parse_step;
use crate::logic::step::ProofStep;
use crate::policy::{PolicyQuery, ProofPolicy};
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Live queue capacity; a full queue admits a child only by evicting a
    /// strictly worse node.
    pub queue_cap: usize,
    /// Policy queries per search (one per expansion).
    pub max_queries: usize,
    /// Candidates sampled per query.
    pub samples_per_expansion: usize,
    /// Sampling temperature handed to the policy.
    pub temperature: f64,
    /// Cost cap for a single step: in-search hammer calls run with their
    /// inference budget clamped to this.
    pub step_budget: u64,
    /// Total cost budget for one search.
    pub total_budget: u64,
    /// Base budget for in-search hammer calls (premise cap and inference
    /// ceiling; the ceiling is clamped to `step_budget`).
    pub hammer_budget: HammerBudget,
    /// Wallclock mirrors of the step/total cost budgets. Off by default:
    /// enabling them trades reproducibility for hard time bounds.
    pub step_wallclock_secs: Option<u64>,
    pub total_wallclock_secs: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            queue_cap: 32,
            max_queries: 300,
            samples_per_expansion: 8,
            temperature: 1.2,
            step_budget: 5_000,
            total_budget: 250_000,
            hammer_budget: HammerBudget::default().without_wallclock(),
            step_wallclock_secs: None,
            total_wallclock_secs: None,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SearchConfigError {
    #[error("queue_cap must be at least 1")]
    ZeroQueueCap,
    #[error("samples_per_expansion must be positive")]
    ZeroSamplesPerExpansion,
    #[error("temperature must be positive, got {0}")]
    BadTemperature(f64),
    #[error("step_budget must be positive")]
    ZeroStepBudget,
    #[error("total_budget must be positive")]
    ZeroTotalBudget,
    #[error("hammer budget must admit at least one premise and one inference")]
    EmptyHammerBudget,
}

impl SearchConfig {
    /// `max_queries` may be zero (such a search reports query exhaustion
    /// immediately); everything else must be positive.
    pub fn validate(&self) -> Result<(), SearchConfigError> {
        if self.queue_cap == 0 {
            return Err(SearchConfigError::ZeroQueueCap);
        }
        if self.samples_per_expansion == 0 {
            return Err(SearchConfigError::ZeroSamplesPerExpansion);
        }
        if !(self.temperature > 0.0) {
            return Err(SearchConfigError::BadTemperature(self.temperature));
        }
        if self.step_budget == 0 {
            return Err(SearchConfigError::ZeroStepBudget);
        }
        if self.total_budget == 0 {
            return Err(SearchConfigError::ZeroTotalBudget);
        }
        if self.hammer_budget.max_selected_premises == 0 || self.hammer_budget.max_inferences == 0
        {
            return Err(SearchConfigError::EmptyHammerBudget);
        }
        Ok(())
    }

    /// The budget an in-search hammer call actually runs with.
    pub fn effective_hammer_budget(&self) -> HammerBudget {
        HammerBudget {
            max_selected_premises: self.hammer_budget.max_selected_premises,
            max_inferences: self.hammer_budget.max_inferences.min(self.step_budget),
            wallclock_secs: self.step_wallclock_secs,
        }
    }
}

/// How candidates that defer to a prover are dispatched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// `<hammer>` candidates invoke the hammer: the full protocol.
    Base,
    /// `<hammer>` candidates are discarded unexecuted; the policy's tactic
    /// steps are the only moves. `by_cert` candidates still replay through
    /// the kernel, which needs no prover.
    PolicyOnly,
    /// For models trained on raw traces: `by_cert` candidates are stripped
    /// to their intent — "call the prover here" — and dispatched to the
    /// hammer, ignoring the memorized certificate.
    LearningHow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Open,
    Expanded,
    Dead,
}

/// One explored proof state. The root has cumulative log-probability 0 and
/// no parent; a child adds its candidate's log-probability, so priorities
/// never exceed the parent's.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub state: ProofState,
    pub state_text: String,
    pub cumulative_log_prob: f64,
    pub depth: usize,
    pub parent: Option<usize>,
    pub incoming_step: Option<ProofStep>,
    pub status: NodeStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Proved,
    QueueExhausted,
    QueryBudgetExhausted,
    TotalBudgetExhausted,
}

impl SearchStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchStatus::Proved => "proved",
            SearchStatus::QueueExhausted => "queue_exhausted",
            SearchStatus::QueryBudgetExhausted => "query_budget_exhausted",
            SearchStatus::TotalBudgetExhausted => "total_budget_exhausted",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub queries: usize,
    pub nodes_expanded: usize,
    pub hammer_calls: u64,
    pub hammer_successes: u64,
    pub cost: u64,
}

/// The result of one search. A `Proved` outcome carries a kernel-checked
/// proof whose `<hammer>` emissions have been resolved to certificate steps.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub proof: Option<Vec<ProofStep>>,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn proved(&self) -> bool {
        self.status == SearchStatus::Proved
    }
}

/// Queue priority; cumulative log-probabilities are always finite.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Priority(f64);

impl Eq for Priority {}

impl PartialOrd for Priority {
    fn partial_cmp(&self, other: &Priority) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Priority {
    fn cmp(&self, other: &Priority) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Queue entries order by priority, then by age: among equal priorities the
/// set's maximum is the *oldest* node (popped first) and its minimum the
/// *newest* (evicted first).
type QueueKey = (Priority, Reverse<usize>);

/// Decorrelates per-expansion sampling while keeping the whole search a
/// function of one seed.
fn expansion_seed(seed: u64, query: usize) -> u64 {
    seed ^ (query as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

enum ChildOutcome {
    Proved(Vec<ProofStep>),
    Duplicate,
    /// In the node table (queued, or dropped dead at a full queue).
    Attached(usize),
}

struct Engine<'a> {
    library: &'a TheoremLibrary,
    statement: &'a Formula,
    policy: &'a dyn ProofPolicy,
    cert_store: Option<&'a CertStore>,
    mode: SearchMode,
    config: &'a SearchConfig,
    hammer_budget: HammerBudget,
    seed: u64,
    deadline: Option<Instant>,
    nodes: Vec<SearchNode>,
    queue: BTreeSet<QueueKey>,
    seen: BTreeSet<String>,
    stats: SearchStats,
    trace: Option<&'a mut Vec<TraceEvent>>,
}

impl Engine<'_> {
    fn emit(&mut self, event: TraceEvent) {
        if let Some(t) = self.trace.as_deref_mut() {
            t.push(event);
        }
    }

    fn over_budget(&self) -> bool {
        self.stats.cost >= self.config.total_budget
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn finish(&mut self, status: SearchStatus, proof: Option<Vec<ProofStep>>) -> SearchOutcome {
        if let Some(steps) = &proof {
            check_proof(self.library, self.statement, steps)
                .expect("search proofs replay through the kernel");
        }
        self.emit(TraceEvent::Outcome {
            status: status.as_str().into(),
            queries: self.stats.queries,
            nodes_expanded: self.stats.nodes_expanded,
            hammer_calls: self.stats.hammer_calls,
            hammer_successes: self.stats.hammer_successes,
            cost: self.stats.cost,
        });
        SearchOutcome {
            status,
            proof,
            stats: self.stats.clone(),
        }
    }

    /// Register `next` as a child of `parent` reached by `step`. Proved
    /// states short-circuit with the assembled root-to-leaf proof; known
    /// states are discarded; the rest join the queue, evicting a strictly
    /// worse node when full.
    fn admit_child(
        &mut self,
        query: usize,
        parent: usize,
        step: ProofStep,
        next: ProofState,
        log_prob: f64,
    ) -> ChildOutcome {
        if is_proved(&next) {
            let mut steps = vec![step];
            let mut cursor = parent;
            while let (Some(s), Some(p)) = (
                &self.nodes[cursor].incoming_step,
                self.nodes[cursor].parent,
            ) {
                steps.push(s.clone());
                cursor = p;
            }
            steps.reverse();
            return ChildOutcome::Proved(steps);
        }
        let text = next.canonical_string();
        if !self.seen.insert(text.clone()) {
            return ChildOutcome::Duplicate;
        }
        let id = self.nodes.len();
        let priority = self.nodes[parent].cumulative_log_prob + log_prob;
        self.nodes.push(SearchNode {
            state: next,
            state_text: text,
            cumulative_log_prob: priority,
            depth: self.nodes[parent].depth + 1,
            parent: Some(parent),
            incoming_step: Some(step),
            status: NodeStatus::Open,
        });
        let key = (Priority(priority), Reverse(id));
        let mut evicted = None;
        let admitted = if self.queue.len() < self.config.queue_cap {
            self.queue.insert(key);
            true
        } else {
            let worst = *self.queue.first().expect("queue_cap is at least 1");
            if key > worst {
                self.queue.pop_first();
                self.nodes[worst.1 .0].status = NodeStatus::Dead;
                evicted = Some(worst.1 .0);
                self.queue.insert(key);
                true
            } else {
                self.nodes[id].status = NodeStatus::Dead;
                false
            }
        };
        self.emit(TraceEvent::Enqueue {
            query,
            child: id,
            priority,
            admitted,
            evicted,
            queue_len: self.queue.len(),
        });
        ChildOutcome::Attached(id)
    }

    /// Apply a parsed step through the kernel; cost 1 whether or not it
    /// sticks. Returns the finished proof when the child closes everything.
    fn dispatch_tactic(
        &mut self,
        query: usize,
        node_id: usize,
        step: ProofStep,
        log_prob: f64,
    ) -> Option<Vec<ProofStep>> {
        self.stats.cost += 1;
        let step_text = step.canonical_string();
        match apply_step(self.library, &self.nodes[node_id].state, &step) {
            Err(_) => {
                self.emit(TraceEvent::Step {
                    query,
                    node: node_id,
                    step: step_text,
                    applied: false,
                    duplicate: false,
                    child: None,
                    cost: 1,
                });
                None
            }
            Ok(next) => match self.admit_child(query, node_id, step, next, log_prob) {
                ChildOutcome::Proved(proof) => {
                    self.emit(TraceEvent::Step {
                        query,
                        node: node_id,
                        step: step_text,
                        applied: true,
                        duplicate: false,
                        child: None,
                        cost: 1,
                    });
                    Some(proof)
                }
                ChildOutcome::Duplicate => {
                    self.emit(TraceEvent::Step {
                        query,
                        node: node_id,
                        step: step_text,
                        applied: true,
                        duplicate: true,
                        child: None,
                        cost: 1,
                    });
                    None
                }
                ChildOutcome::Attached(id) => {
                    self.emit(TraceEvent::Step {
                        query,
                        node: node_id,
                        step: step_text,
                        applied: true,
                        duplicate: false,
                        child: Some(id),
                        cost: 1,
                    });
                    None
                }
            },
        }
    }

    /// Run the hammer on the node's first goal; cost is the inference count
    /// (at least 1). A failed call discards only this candidate.
    fn dispatch_hammer(
        &mut self,
        query: usize,
        node_id: usize,
        log_prob: f64,
    ) -> Option<Vec<ProofStep>> {
        let out = hammer(
            self.library,
            self.nodes[node_id]
                .state
                .first_goal()
                .expect("queued nodes have open goals"),
            &self.hammer_budget,
        );
        let cost = out.inferences_used.max(1);
        self.stats.cost += cost;
        self.stats.hammer_calls += 1;
        if !out.proved() {
            self.emit(TraceEvent::Hammer {
                query,
                node: node_id,
                proved: false,
                inferences: out.inferences_used,
                cost,
                duplicate: false,
                child: None,
                step: None,
            });
            return None;
        }
        self.stats.hammer_successes += 1;
        let step = out.to_step().expect("proved hammer outcomes carry a certificate");
        let step_text = step.canonical_string();
        let next = apply_step(self.library, &self.nodes[node_id].state, &step)
            .expect("hammer certificates replay against their goal");
        let (proof, duplicate, child) =
            match self.admit_child(query, node_id, step, next, log_prob) {
                ChildOutcome::Proved(proof) => (Some(proof), false, None),
                ChildOutcome::Duplicate => (None, true, None),
                ChildOutcome::Attached(id) => (None, false, Some(id)),
            };
        self.emit(TraceEvent::Hammer {
            query,
            node: node_id,
            proved: true,
            inferences: out.inferences_used,
            cost,
            duplicate,
            child,
            step: Some(step_text),
        });
        proof
    }

    fn run(&mut self) -> SearchOutcome {
        loop {
            if self.over_budget() {
                return self.finish(SearchStatus::TotalBudgetExhausted, None);
            }
            if self.stats.queries >= self.config.max_queries {
                return self.finish(SearchStatus::QueryBudgetExhausted, None);
            }
            let Some((priority, Reverse(node_id))) = self.queue.pop_last() else {
                return self.finish(SearchStatus::QueueExhausted, None);
            };
            self.nodes[node_id].status = NodeStatus::Expanded;
            self.stats.queries += 1;
            self.stats.nodes_expanded += 1;
            let query = self.stats.queries;
            self.emit(TraceEvent::Pop {
                query,
                node: node_id,
                priority: priority.0,
                depth: self.nodes[node_id].depth,
                queue_len: self.queue.len(),
            });

            let policy_query = PolicyQuery {
                context: self.nodes[node_id]
                    .incoming_step
                    .as_ref()
                    .map(|s| s.canonical_string())
                    .unwrap_or_default(),
                proof_state: self.nodes[node_id].state_text.clone(),
            };
            let suggestions = self
                .policy
                .suggest(
                    &policy_query,
                    self.config.samples_per_expansion,
                    self.config.temperature,
                    expansion_seed(self.seed, query),
                )
                .expect("policy answers well-formed queries");
            self.emit(TraceEvent::Expand {
                query,
                node: node_id,
                state: policy_query.proof_state,
                support: suggestions.support.clone(),
                candidates: suggestions
                    .candidates
                    .iter()
                    .map(|c| c.step_text.clone())
                    .collect(),
                fallback: suggestions.fallback,
            });

            for candidate in &suggestions.candidates {
                // One in-flight step may overshoot the budget line; stop
                // dispatching as soon as it is crossed.
                if self.over_budget() {
                    return self.finish(SearchStatus::TotalBudgetExhausted, None);
                }
                let text = candidate.step_text.as_str();
                let parsed = if text == HAMMER_TOKEN {
                    Ok(ProofStep::HammerToken)
                } else {
                    parse_step(text)
                };
                let proof = match parsed {
                    Ok(ProofStep::HammerToken) => match self.mode {
                        // No prover in this regime; the candidate is
                        // discarded unexecuted and costs nothing.
                        SearchMode::PolicyOnly => continue,
                        _ => self.dispatch_hammer(query, node_id, candidate.log_prob),
                    },
                    Ok(ProofStep::ByCertificate(_))
                        if self.mode == SearchMode::LearningHow =>
                    {
                        self.dispatch_hammer(query, node_id, candidate.log_prob)
                    }
                    Ok(ProofStep::ByCertificate(cs)) => {
                        let step = match self.cert_store.and_then(|s| s.get(&cs.cert_id)) {
                            Some(cert) => {
                                ProofStep::ByCertificate(cs.with_certificate(cert.clone()))
                            }
                            // Unknown id: the kernel rejects it below.
                            None => ProofStep::ByCertificate(cs),
                        };
                        self.dispatch_tactic(query, node_id, step, candidate.log_prob)
                    }
                    Ok(step) => self.dispatch_tactic(query, node_id, step, candidate.log_prob),
                    Err(_) => {
                        self.stats.cost += 1;
                        self.emit(TraceEvent::Step {
                            query,
                            node: node_id,
                            step: text.into(),
                            applied: false,
                            duplicate: false,
                            child: None,
                            cost: 1,
                        });
                        None
                    }
                };
                if let Some(proof) = proof {
                    return self.finish(SearchStatus::Proved, Some(proof));
                }
            }
        }
    }
}

/// Search for a proof of `statement`. `cert_store` resolves policy-emitted
/// `by_cert` steps to their payloads; `trace`, when given, receives one
/// event per queue operation. Panics on an invalid `config` (validate
/// upstream) and on kernel-level invariant violations.
#[allow(clippy::too_many_arguments)]
pub fn best_first_search(
    library: &TheoremLibrary,
    statement: &Formula,
    policy: &dyn ProofPolicy,
    cert_store: Option<&CertStore>,
    mode: SearchMode,
    config: &SearchConfig,
    seed: u64,
    trace: Option<&mut Vec<TraceEvent>>,
) -> SearchOutcome {
    config.validate().expect("search config must validate");
    let root_state = ProofState::initial(statement);
    let root = SearchNode {
        state_text: root_state.canonical_string(),
        state: root_state,
        cumulative_log_prob: 0.0,
        depth: 0,
        parent: None,
        incoming_step: None,
        status: NodeStatus::Open,
    };
    let mut seen = BTreeSet::new();
    seen.insert(root.state_text.clone());
    let mut queue = BTreeSet::new();
    queue.insert((Priority(0.0), Reverse(0usize)));
    let mut engine = Engine {
        library,
        statement,
        policy,
        cert_store,
        mode,
        config,
        hammer_budget: config.effective_hammer_budget(),
        seed,
        deadline: config
            .total_wallclock_secs
            .map(|s| Instant::now() + Duration::from_secs(s)),
        nodes: vec![root],
        queue,
        seen,
        stats: SearchStats::default(),
        trace,
    };
    engine.run()
}
