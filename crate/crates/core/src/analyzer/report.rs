//! Structured trace output.

use serde::Serialize;

use crate::analyzer::explore::Trace;
use crate::analyzer::pomset::{pomset_of, PomsetError};
use crate::anp::AnpAssertion;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct StepJson {
    pub label: String,
    pub event_id: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PomsetJson {
    pub elements: Vec<String>,
    pub order: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TraceJson {
    pub steps: Vec<StepJson>,
    pub complete: bool,
    pub pomset: PomsetJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceReport {
    pub traces: Vec<TraceJson>,
}

impl TraceReport {
    pub fn new(traces: &[Trace<AnpAssertion>]) -> Result<Self, PomsetError> {
        Ok(TraceReport {
            traces: sorted_traces(traces)?.into_iter().map(|(j, _)| j).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

/// Traces paired with their rendering, sorted by it, with duplicates of
/// the rendered form dropped. The order does not depend on exploration
/// order or on fresh names.
pub fn sorted_traces(
    traces: &[Trace<AnpAssertion>],
) -> Result<Vec<(TraceJson, &Trace<AnpAssertion>)>, PomsetError> {
    let mut out = traces
        .iter()
        .map(|t| trace_json(t).map(|j| (j, t)))
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.dedup_by(|a, b| a.0 == b.0);
    Ok(out)
}

pub fn trace_json(t: &Trace<AnpAssertion>) -> Result<TraceJson, PomsetError> {
    let run = pomset_of(&t.final_assertion)?;
    Ok(TraceJson {
        steps: t
            .steps
            .iter()
            .map(|s| StepJson {
                label: s.label.to_string(),
                event_id: s.events.iter().map(|e| e.as_str().to_string()).collect(),
            })
            .collect(),
        complete: t.complete(),
        pomset: PomsetJson {
            elements: run.elements.keys().map(|e| e.as_str().to_string()).collect(),
            order: run
                .order
                .iter()
                .map(|(a, b)| [a.as_str().to_string(), b.as_str().to_string()])
                .collect(),
        },
    })
}
