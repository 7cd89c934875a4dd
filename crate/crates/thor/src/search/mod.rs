//! Proof search: training-data preprocessing and best-first tactic search.

pub mod best_first;
pub mod preprocess;
pub mod trace;

pub use best_first::{
    best_first_search, NodeStatus, SearchConfig, SearchConfigError, SearchMode, SearchNode,
    SearchOutcome, SearchStats, SearchStatus,
};
pub use preprocess::{preprocess_corpus, preprocess_datapoint, PreprocessError, PreprocessReport};
pub use trace::{read_trace_jsonl, write_trace_jsonl, TraceEvent};
