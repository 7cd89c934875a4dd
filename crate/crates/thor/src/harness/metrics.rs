//! Premise-step success: how often attempted steps advance the proof state,
//! split by whether the step cites library premises.

use crate::logic::parse::parse_step;
use crate::search::TraceEvent;
use serde::{Deserialize, Serialize};

/// Advance fractions for premise-bearing (`apply`, `by_cert`) versus
/// premise-free candidates, over a set of search traces. Rates are percents
/// rounded to one decimal; a class with no attempts reports `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PremiseStepMetric {
    pub premise_attempts: usize,
    pub premise_advanced: usize,
    pub premise_rate: Option<f64>,
    pub plain_attempts: usize,
    pub plain_advanced: usize,
    pub plain_rate: Option<f64>,
}

impl PremiseStepMetric {
    pub fn render_text(&self) -> String {
        let fmt = |rate: Option<f64>| match rate {
            Some(r) => format!("{r:.1}%"),
            None => "n/a".to_string(),
        };
        format!(
            "premise-step success\n\
             premise-bearing  {:>5}/{:<5}  {}\n\
             premise-free     {:>5}/{:<5}  {}\n",
            self.premise_advanced,
            self.premise_attempts,
            fmt(self.premise_rate),
            self.plain_advanced,
            self.plain_attempts,
            fmt(self.plain_rate),
        )
    }
}

/// Classify every attempted candidate in `traces` and measure the fraction
/// per class that advanced the state (kernel-accepted, not a duplicate).
/// Candidates the kernel grammar rejects outright count as premise-free
/// attempts that never advance.
pub fn premise_step_success_metric<'a, I>(traces: I) -> PremiseStepMetric
where
    I: IntoIterator<Item = &'a [TraceEvent]>,
{
    let mut metric = PremiseStepMetric::default();
    for trace in traces {
        for event in trace {
            let TraceEvent::Step {
                step,
                applied,
                duplicate,
                ..
            } = event
            else {
                continue;
            };
            let premise_bearing = parse_step(step)
                .map(|s| !s.cited_premises().is_empty())
                .unwrap_or(false);
            let advanced = *applied && !*duplicate;
            if premise_bearing {
                metric.premise_attempts += 1;
                metric.premise_advanced += usize::from(advanced);
            } else {
                metric.plain_attempts += 1;
                metric.plain_advanced += usize::from(advanced);
            }
        }
    }
    metric.premise_rate = rate(metric.premise_advanced, metric.premise_attempts);
    metric.plain_rate = rate(metric.plain_advanced, metric.plain_attempts);
    metric
}

fn rate(advanced: usize, attempts: usize) -> Option<f64> {
    (attempts > 0).then(|| super::percent(advanced, attempts))
}
