//! Optional search traces: one JSON record per queue event.
//!
//! The evaluation harness replays these to check search invariants (popped
//! priorities never increase, the live queue never exceeds its cap), to
//! compare candidate supports across temperature settings, and to measure
//! per-candidate advance rates. Everything a consumer needs is in the
//! events themselves; no access to the search's internal node table is
//! required.

use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// A node left the queue for expansion. `queue_len` counts the live
    /// queue after the removal.
    Pop {
        query: usize,
        node: usize,
        priority: f64,
        depth: usize,
        queue_len: usize,
    },
    /// The policy answered a query. `support` is the sorted distinct step
    /// set of the policy's untempered distribution at this state, recorded
    /// before sampling; `candidates` the sampled batch in dispatch order.
    Expand {
        query: usize,
        node: usize,
        state: String,
        support: Vec<String>,
        candidates: Vec<String>,
        fallback: bool,
    },
    /// A tactic candidate was applied to the popped node's state.
    /// `applied` is kernel acceptance; `duplicate` marks children discarded
    /// for re-deriving an already-seen state.
    Step {
        query: usize,
        node: usize,
        step: String,
        applied: bool,
        duplicate: bool,
        child: Option<usize>,
        cost: u64,
    },
    /// A candidate invoked the hammer on the popped node's state. `step` is
    /// the certificate step a successful call resolved to.
    Hammer {
        query: usize,
        node: usize,
        proved: bool,
        inferences: u64,
        cost: u64,
        duplicate: bool,
        child: Option<usize>,
        step: Option<String>,
    },
    /// A child reached the queue. `admitted` is false when the queue was
    /// full of better nodes; `evicted` names the node it displaced.
    /// `queue_len` counts the live queue after the operation.
    Enqueue {
        query: usize,
        child: usize,
        priority: f64,
        admitted: bool,
        evicted: Option<usize>,
        queue_len: usize,
    },
    /// The search ended.
    Outcome {
        status: String,
        queries: usize,
        nodes_expanded: usize,
        hammer_calls: u64,
        hammer_successes: u64,
        cost: u64,
    },
}

/// One `serde_json` object per line, trailing newline, written in one shot.
pub fn write_trace_jsonl(path: &Path, events: &[TraceEvent]) -> std::io::Result<()> {
    let mut buf = String::new();
    for event in events {
        buf.push_str(&serde_json::to_string(event).expect("trace events serialize"));
        buf.push('\n');
    }
    std::fs::write(path, buf)
}

pub fn read_trace_jsonl(path: &Path) -> std::io::Result<Vec<TraceEvent>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .map(|line| {
            serde_json::from_str(line)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
        })
        .collect()
}
