use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::analyzer::explore::Trace;
use crate::anp::{ActionRecord, AnpAssertion};
use crate::ceremony::CeremonySpec;
use crate::psi::EventId;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PomsetRun {
    pub elements: BTreeMap<EventId, ActionRecord>,
    /// Strict order over keys of `elements`.
    pub order: BTreeSet<(EventId, EventId)>,
}

impl PomsetRun {
    pub fn precedes(&self, a: &EventId, b: &EventId) -> bool {
        self.order.contains(&(a.clone(), b.clone()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PomsetError {
    #[error("event `{after}` was executed without its predecessor `{before}`")]
    InconsistentAssertion { before: EventId, after: EventId },
}

pub fn extract_pomset(t: &Trace<AnpAssertion>) -> Result<PomsetRun, PomsetError> {
    pomset_of(&t.final_assertion)
}

/// The run recorded by an assertion: its executed records, ordered by the
/// dependency pairs between them.
pub fn pomset_of(a: &AnpAssertion) -> Result<PomsetRun, PomsetError> {
    let elements: BTreeMap<EventId, ActionRecord> = a
        .done()
        .iter()
        .map(|r| (r.event.clone(), r.clone()))
        .collect();
    let mut order = BTreeSet::new();
    for (x, y) in a.depends() {
        match (elements.contains_key(x), elements.contains_key(y)) {
            (true, true) => {
                order.insert((x.clone(), y.clone()));
            }
            (false, true) => {
                return Err(PomsetError::InconsistentAssertion {
                    before: x.clone(),
                    after: y.clone(),
                })
            }
            _ => {}
        }
    }
    Ok(PomsetRun { elements, order })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Match,
    MissingPairs(Vec<(EventId, EventId)>),
    /// Executed events the ceremony does not declare.
    ExtraElements(Vec<EventId>),
    /// Declared events the run never executed.
    MissingElements(Vec<EventId>),
}

impl Verdict {
    pub fn is_match(&self) -> bool {
        *self == Verdict::Match
    }
}

/// Compares a run with the ceremony's declared events and desired order.
pub fn check_desired_run(run: &PomsetRun, spec: &CeremonySpec) -> Verdict {
    let missing_pairs: Vec<_> = spec
        .run
        .iter()
        .map(|p| (EventId::new(&p.before), EventId::new(&p.after)))
        .filter(|p| !run.order.contains(p))
        .collect();
    if !missing_pairs.is_empty() {
        return Verdict::MissingPairs(missing_pairs);
    }
    let declared: BTreeSet<EventId> = spec.events.iter().map(|e| EventId::new(&e.id)).collect();
    let have: BTreeSet<EventId> = run.elements.keys().cloned().collect();
    let extra: Vec<_> = have.difference(&declared).cloned().collect();
    if !extra.is_empty() {
        return Verdict::ExtraElements(extra);
    }
    let missing: Vec<_> = declared.difference(&have).cloned().collect();
    if !missing.is_empty() {
        return Verdict::MissingElements(missing);
    }
    Verdict::Match
}
