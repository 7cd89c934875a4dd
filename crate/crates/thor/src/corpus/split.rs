//! Theorem-level train/valid/test splitting by seeded shuffle.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitLabel {
    Train,
    Valid,
    Test,
}

/// The assignment plus the configuration that produced it, so reports can
/// echo it and loads can re-verify it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub fractions: (f64, f64, f64),
    pub seed: u64,
    pub assignment: BTreeMap<String, SplitLabel>,
}

impl SplitInfo {
    /// Everything in train: the state of a freshly generated corpus.
    pub fn all_train(theorem_names: impl IntoIterator<Item = String>) -> SplitInfo {
        SplitInfo {
            fractions: (1.0, 0.0, 0.0),
            seed: 0,
            assignment: theorem_names
                .into_iter()
                .map(|n| (n, SplitLabel::Train))
                .collect(),
        }
    }

    pub fn names_in(&self, label: SplitLabel) -> Vec<&str> {
        self.assignment
            .iter()
            .filter(|(_, l)| **l == label)
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SplitError {
    #[error("fractions {0:?} must be non-negative and sum to 1")]
    BadFractions((f64, f64, f64)),
}

/// Whole-theorem assignment: seeded shuffle, then contiguous blocks sized by
/// largest-remainder rounding (train gets remainder-ties first, then valid).
pub fn assign_split(
    theorem_names: &[String],
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<SplitInfo, SplitError> {
    let (ft, fv, fs) = fractions;
    if ft < 0.0 || fv < 0.0 || fs < 0.0 || (ft + fv + fs - 1.0).abs() > 1e-9 {
        return Err(SplitError::BadFractions(fractions));
    }
    let n = theorem_names.len();
    let counts = largest_remainder(n, [ft, fv, fs]);

    let mut order: Vec<&String> = theorem_names.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut assignment = BTreeMap::new();
    for (i, name) in order.into_iter().enumerate() {
        let label = if i < counts[0] {
            SplitLabel::Train
        } else if i < counts[0] + counts[1] {
            SplitLabel::Valid
        } else {
            SplitLabel::Test
        };
        assignment.insert(name.clone(), label);
    }
    Ok(SplitInfo {
        fractions,
        seed,
        assignment,
    })
}

fn largest_remainder(n: usize, fractions: [f64; 3]) -> [usize; 3] {
    let raw: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut leftover = n - counts.iter().sum::<usize>();
    // Stable order: remainder descending, then train > valid > test.
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| {
        let ra = raw[a] - raw[a].floor();
        let rb = raw[b] - raw[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for i in idx {
        if leftover == 0 {
            break;
        }
        counts[i] += 1;
        leftover -= 1;
    }
    [counts[0], counts[1], counts[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("thm{i}")).collect()
    }

    #[test]
    fn all_train_fractions() {
        let s = assign_split(&names(10), (1.0, 0.0, 0.0), 7).unwrap();
        assert!(s.assignment.values().all(|l| *l == SplitLabel::Train));
    }

    #[test]
    fn default_fractions_on_100_theorems() {
        let s = assign_split(&names(100), (0.95, 0.01, 0.04), 42).unwrap();
        let count = |l| s.assignment.values().filter(|x| **x == l).count();
        assert_eq!(count(SplitLabel::Train), 95);
        assert_eq!(count(SplitLabel::Valid), 1);
        assert_eq!(count(SplitLabel::Test), 4);
    }

    #[test]
    fn largest_remainder_spreads_the_leftover() {
        // 10 * (0.5, 0.25, 0.25) is exact; 7 * same is 3.5/1.75/1.75 ->
        // floors 3/1/1, remainders .5/.75/.75: valid and test get the two
        // leftover slots.
        assert_eq!(largest_remainder(7, [0.5, 0.25, 0.25]), [3, 2, 2]);
        assert_eq!(largest_remainder(10, [0.5, 0.25, 0.25]), [5, 3, 2]);
    }

    #[test]
    fn same_seed_same_split_distinct_seed_differs() {
        let a = assign_split(&names(60), (0.6, 0.05, 0.35), 1).unwrap();
        let b = assign_split(&names(60), (0.6, 0.05, 0.35), 1).unwrap();
        let c = assign_split(&names(60), (0.6, 0.05, 0.35), 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.assignment, c.assignment);
    }

    #[test]
    fn bad_fractions_are_rejected() {
        assert!(assign_split(&names(3), (0.5, 0.5, 0.5), 0).is_err());
        assert!(assign_split(&names(3), (-0.1, 0.6, 0.5), 0).is_err());
    }
}
