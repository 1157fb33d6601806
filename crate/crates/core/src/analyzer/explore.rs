//! Bounded depth-first enumeration of maximal traces.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::psi::{frame, transitions_with_cost, EventId, Instance, Label, Proc, PsiError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExploreConfig {
    pub depth_bound: usize,
    pub unfold_budget: usize,
    /// Closed world: only internal steps are followed.
    pub tau_only: bool,
    /// Events that must all have happened for a stuck trace to count as
    /// complete.
    pub expected_events: BTreeSet<EventId>,
}

impl ExploreConfig {
    pub fn new(depth_bound: usize, unfold_budget: usize) -> Self {
        ExploreConfig {
            depth_bound,
            unfold_budget,
            tau_only: false,
            expected_events: BTreeSet::new(),
        }
    }

    pub fn closed(mut self, expected: impl IntoIterator<Item = EventId>) -> Self {
        self.tau_only = true;
        self.expected_events = expected.into_iter().collect();
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraceStatus {
    /// Stuck with every expected event executed.
    Complete,
    /// Stuck with some expected event missing.
    Deadlocked,
    /// Cut off by the depth bound.
    BoundExceeded,
}

impl fmt::Display for TraceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceStatus::Complete => "complete",
            TraceStatus::Deadlocked => "deadlocked",
            TraceStatus::BoundExceeded => "bound exceeded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub label: Label,
    /// Events whose records appeared in this step, sorted.
    pub events: Vec<EventId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace<A> {
    pub steps: Vec<TraceStep>,
    pub final_assertion: A,
    pub status: TraceStatus,
}

impl<A> Trace<A> {
    pub fn complete(&self) -> bool {
        self.status == TraceStatus::Complete
    }

    /// Position of the step that executed `e`.
    pub fn step_of(&self, e: &EventId) -> Option<usize> {
        self.steps.iter().position(|s| s.events.contains(e))
    }
}

type Suffix<A> = (Vec<TraceStep>, A, TraceStatus);
type Key<C, A> = (crate::psi::Process<C, A>, usize, usize);
type Memo<C, A> = HashMap<Key<C, A>, Rc<Vec<Suffix<A>>>>;

struct Explorer<'a, I: Instance> {
    inst: &'a I,
    cfg: &'a ExploreConfig,
    memo: Memo<I::Condition, I::Assertion>,
}

/// Every maximal trace of `p` up to the depth bound. States equal up to
/// normal form share their suffixes; transitions with equal labels and
/// equal normalised targets are followed once.
pub fn explore<I: Instance>(
    p: &Proc<I>,
    inst: &I,
    cfg: &ExploreConfig,
) -> Result<Vec<Trace<I::Assertion>>, PsiError> {
    let mut ex = Explorer {
        inst,
        cfg,
        memo: HashMap::new(),
    };
    let suffixes = ex.visit(p, cfg.unfold_budget, cfg.depth_bound)?;
    Ok(suffixes
        .iter()
        .map(|(steps, a, status)| Trace {
            steps: steps.clone(),
            final_assertion: a.clone(),
            status: *status,
        })
        .collect())
}

impl<'a, I: Instance> Explorer<'a, I> {
    fn visit(
        &mut self,
        p: &Proc<I>,
        budget: usize,
        depth: usize,
    ) -> Result<Rc<Vec<Suffix<I::Assertion>>>, PsiError> {
        let key = (p.normal_form(), budget, depth);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let here = frame(self.inst, p)?.assertion;
        let done_here = self.inst.executed_events(&here);
        let unit = self.inst.unit();
        let mut seen = BTreeSet::new();
        let moves: Vec<_> = transitions_with_cost(&unit, p, self.inst, budget)?
            .into_iter()
            .filter(|t| !self.cfg.tau_only || t.label.is_tau())
            .filter(|t| seen.insert((t.label.clone(), t.target.normal_form())))
            .collect();

        let mut out = Vec::new();
        if moves.is_empty() {
            let status = if self.cfg.expected_events.is_subset(&done_here) {
                TraceStatus::Complete
            } else {
                TraceStatus::Deadlocked
            };
            out.push((Vec::new(), here, status));
        } else if depth == 0 {
            out.push((Vec::new(), here, TraceStatus::BoundExceeded));
        } else {
            for t in moves {
                let after = frame(self.inst, &t.target)?.assertion;
                let events: Vec<EventId> = self
                    .inst
                    .executed_events(&after)
                    .difference(&done_here)
                    .cloned()
                    .collect();
                let step = TraceStep {
                    label: t.label,
                    events,
                };
                for (rest, a, status) in self.visit(&t.target, budget - t.cost, depth - 1)?.iter() {
                    let mut steps = Vec::with_capacity(rest.len() + 1);
                    steps.push(step.clone());
                    steps.extend(rest.iter().cloned());
                    out.push((steps, a.clone(), *status));
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}
