//! Premise-count histograms over proofs: buckets 0–4 and 5+.

use crate::logic::step::ProofStep;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write as _;

pub const BUCKET_LABELS: [&str; 6] = ["0", "1", "2", "3", "4", "5+"];

/// Counts of proofs by number of distinct premises cited.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub buckets: [usize; 6],
    pub total: usize,
}

impl Histogram {
    pub fn new() -> Histogram {
        Histogram::default()
    }

    pub fn add(&mut self, premise_count: usize) {
        self.buckets[premise_count.min(5)] += 1;
        self.total += 1;
    }

    /// Fraction of proofs in bucket `i`, or `None` on an empty histogram.
    pub fn fraction(&self, i: usize) -> Option<f64> {
        if self.total == 0 {
            None
        } else {
            Some(self.buckets[i] as f64 / self.total as f64)
        }
    }

    /// Proof mass in buckets 2..=5 (two or more distinct premises).
    pub fn mass_at_least_two(&self) -> usize {
        self.buckets[2..].iter().sum()
    }
}

/// Distinct library facts a proof cites, over every step.
pub fn premises_of_proof(steps: &[ProofStep]) -> usize {
    let mut names: BTreeSet<String> = BTreeSet::new();
    for step in steps {
        names.extend(step.cited_premises());
    }
    names.len()
}

/// Aligned text table: one row per labelled histogram, one column per bucket.
pub fn render_histogram_table(title: &str, rows: &[(&str, &Histogram)]) -> String {
    let name_width = rows
        .iter()
        .map(|(name, _)| name.len())
        .chain(std::iter::once("system".len()))
        .max()
        .unwrap_or(6);
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:<name_width$}", "system");
    for label in BUCKET_LABELS {
        let _ = write!(out, "  {label:>6}");
    }
    let _ = writeln!(out, "  {:>6}", "total");
    for (name, hist) in rows {
        let _ = write!(out, "{name:<name_width$}");
        for count in hist.buckets {
            let _ = write!(out, "  {count:>6}");
        }
        let _ = writeln!(out, "  {:>6}", hist.total);
    }
    out
}

/// CSV with the same content as the text table (one row per histogram).
pub fn render_histogram_csv(rows: &[(&str, &Histogram)]) -> String {
    let mut out = String::from("system,premises_0,premises_1,premises_2,premises_3,premises_4,premises_5_plus,total\n");
    for (name, hist) in rows {
        let _ = write!(out, "{name}");
        for count in hist.buckets {
            let _ = write!(out, ",{count}");
        }
        let _ = writeln!(out, ",{}", hist.total);
    }
    out
}
