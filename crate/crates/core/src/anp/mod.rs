//! The ANP instance: channel terms over configuration paths, equality and
//! history conditions, and assertions that accumulate executed actions and
//! the dependency order between them.

pub mod rewrite;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::nominal::{Name, NameMap, Nominal};
use crate::psi::{CompositionError, EventId, Instance, Process};
use crate::term::{ChannelTerm, Term};

pub use rewrite::{message_eq, normalize, RewriteRule, DEFAULT_STEP_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnpError {
    #[error("dependency cycle through event `{0}`")]
    Cycle(EventId),
    #[error("rewriting exceeded {cap} steps")]
    RewriteDivergence { cap: usize },
}

impl From<AnpError> for CompositionError {
    fn from(e: AnpError) -> Self {
        CompositionError {
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Input,
    Output,
}

/// One executed action. The event id distinguishes syntactically equal
/// communications at different positions of a run.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionRecord {
    pub event: EventId,
    pub polarity: Polarity,
    pub channel: ChannelTerm,
    pub payload: Term,
}

impl ActionRecord {
    /// Events are uncontrolled communications, actions controlled ones.
    pub fn is_controlled(&self) -> bool {
        self.channel.at.controller.is_some()
    }
}

impl Nominal for ActionRecord {
    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        self.channel.collect_names(out);
        self.payload.collect_names(out);
    }

    fn rename_apply(&self, map: &NameMap) -> Self {
        ActionRecord {
            event: self.event.clone(),
            polarity: self.polarity,
            channel: self.channel.rename_apply(map),
            payload: self.payload.rename_apply(map),
        }
    }
}

impl fmt::Display for ActionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Output => write!(f, "{}:<{}>{}", self.event, self.channel, self.payload),
            Polarity::Input => write!(f, "{}:({}){}", self.event, self.channel, self.payload),
        }
    }
}

/// Executed actions plus a strict partial order of dependencies between
/// them, keyed by event id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnpAssertion {
    done: BTreeSet<ActionRecord>,
    depends: BTreeSet<(EventId, EventId)>,
}

impl AnpAssertion {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Closes `depends` transitively; fails on a reflexive pair.
    pub fn new(
        done: impl IntoIterator<Item = ActionRecord>,
        depends: impl IntoIterator<Item = (EventId, EventId)>,
    ) -> Result<Self, AnpError> {
        Ok(AnpAssertion {
            done: done.into_iter().collect(),
            depends: transitive_closure(depends.into_iter().collect())?,
        })
    }

    pub fn done(&self) -> &BTreeSet<ActionRecord> {
        &self.done
    }

    pub fn depends(&self) -> &BTreeSet<(EventId, EventId)> {
        &self.depends
    }

    pub fn executed(&self) -> BTreeSet<EventId> {
        self.done.iter().map(|r| r.event.clone()).collect()
    }

    pub fn record(&self, event: &EventId) -> Option<&ActionRecord> {
        self.done.iter().find(|r| &r.event == event)
    }

    pub fn is_empty(&self) -> bool {
        self.done.is_empty() && self.depends.is_empty()
    }
}

fn transitive_closure(
    mut pairs: BTreeSet<(EventId, EventId)>,
) -> Result<BTreeSet<(EventId, EventId)>, AnpError> {
    let mut succ: BTreeMap<EventId, BTreeSet<EventId>> = BTreeMap::new();
    for (a, b) in &pairs {
        succ.entry(a.clone()).or_default().insert(b.clone());
    }
    let nodes: Vec<EventId> = succ.keys().cloned().collect();
    for start in &nodes {
        let mut stack: Vec<EventId> = succ[start].iter().cloned().collect();
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            if let Some(next) = succ.get(&n) {
                stack.extend(next.iter().cloned());
            }
        }
        if seen.contains(start) {
            return Err(AnpError::Cycle(start.clone()));
        }
        pairs.extend(seen.into_iter().map(|n| (start.clone(), n)));
    }
    Ok(pairs)
}

impl Nominal for AnpAssertion {
    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        self.done.collect_names(out);
    }

    fn rename_apply(&self, map: &NameMap) -> Self {
        AnpAssertion {
            done: self.done.rename_apply(map),
            depends: self.depends.clone(),
        }
    }
}

impl fmt::Display for AnpAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("done: {")?;
        for (i, r) in self.done.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("}; depends: {")?;
        for (i, (a, b)) in self.depends.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a} < {b}")?;
        }
        f.write_str("}")
    }
}

/// Atomic or conjunctive condition; conjunctions hold atoms only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnpCondition {
    TermEq(Term, Term),
    /// All listed events have been executed.
    Done(BTreeSet<EventId>),
    All(Vec<AnpCondition>),
}

impl AnpCondition {
    pub fn done(events: impl IntoIterator<Item = EventId>) -> Self {
        AnpCondition::Done(events.into_iter().collect())
    }

    /// Flattened conjunction; a single conjunct is returned as is.
    pub fn and(parts: impl IntoIterator<Item = AnpCondition>) -> Self {
        let mut atoms = Vec::new();
        for p in parts {
            match p {
                AnpCondition::All(inner) => atoms.extend(inner),
                atom => atoms.push(atom),
            }
        }
        if atoms.len() == 1 {
            atoms.pop().unwrap()
        } else {
            AnpCondition::All(atoms)
        }
    }
}

impl Nominal for AnpCondition {
    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            AnpCondition::TermEq(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            AnpCondition::Done(_) => {}
            AnpCondition::All(cs) => cs.iter().for_each(|c| c.collect_names(out)),
        }
    }

    fn rename_apply(&self, map: &NameMap) -> Self {
        match self {
            AnpCondition::TermEq(a, b) => {
                AnpCondition::TermEq(a.rename_apply(map), b.rename_apply(map))
            }
            AnpCondition::Done(s) => AnpCondition::Done(s.clone()),
            AnpCondition::All(cs) => AnpCondition::All(cs.iter().map(|c| c.rename_apply(map)).collect()),
        }
    }
}

impl fmt::Display for AnpCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnpCondition::TermEq(a, b) => write!(f, "{a} = {b}"),
            AnpCondition::Done(es) => {
                f.write_str("done(")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
            AnpCondition::All(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ∧ ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

pub type AnpProcess = Process<AnpCondition, AnpAssertion>;

/// The ANP signature: rewrite rules for message equality, plus the declared
/// events and term probes making up the condition sample.
#[derive(Clone, Debug, Default)]
pub struct AnpInstance {
    pub rules: Vec<RewriteRule>,
    pub step_cap: usize,
    pub events: Vec<EventId>,
    pub probes: Vec<AnpCondition>,
}

impl AnpInstance {
    /// Instance with no equations, no declared events and no probes.
    pub fn plain() -> Self {
        make_anp_instance(Vec::new(), Vec::new(), Vec::new())
    }

    pub fn term_eq(&self, m: &Term, n: &Term) -> Result<bool, AnpError> {
        match (m, n) {
            (Term::Channel(_), _) | (_, Term::Channel(_)) => Ok(m == n),
            _ => message_eq(m, n, &self.rules, self.step_cap),
        }
    }
}

pub fn make_anp_instance(
    rules: Vec<RewriteRule>,
    events: Vec<EventId>,
    probes: Vec<AnpCondition>,
) -> AnpInstance {
    AnpInstance {
        rules,
        step_cap: DEFAULT_STEP_CAP,
        events,
        probes,
    }
}

/// Channel equality on ANP channel terms.
pub fn anp_channel_eq(m: &ChannelTerm, k: &ChannelTerm) -> AnpCondition {
    AnpCondition::TermEq(Term::Channel(m.clone()), Term::Channel(k.clone()))
}

/// Term equality ignores the assertion; history conditions are set
/// containment. A divergent rewrite counts as not entailed.
pub fn anp_entails(inst: &AnpInstance, psi: &AnpAssertion, phi: &AnpCondition) -> bool {
    match phi {
        AnpCondition::TermEq(m, n) => inst.term_eq(m, n).unwrap_or(false),
        AnpCondition::Done(events) => {
            let executed = psi.executed();
            events.is_subset(&executed)
        }
        AnpCondition::All(cs) => cs.iter().all(|c| anp_entails(inst, psi, c)),
    }
}

pub fn anp_compose(a: &AnpAssertion, b: &AnpAssertion) -> Result<AnpAssertion, AnpError> {
    if a.is_empty() {
        return Ok(b.clone());
    }
    if b.is_empty() {
        return Ok(a.clone());
    }
    AnpAssertion::new(
        a.done.union(&b.done).cloned(),
        a.depends.union(&b.depends).cloned(),
    )
}

impl Instance for AnpInstance {
    type Condition = AnpCondition;
    type Assertion = AnpAssertion;

    fn channel_eq(&self, m: &Term, n: &Term) -> AnpCondition {
        AnpCondition::TermEq(m.clone(), n.clone())
    }

    fn entails(&self, assertion: &AnpAssertion, condition: &AnpCondition) -> bool {
        anp_entails(self, assertion, condition)
    }

    fn compose(&self, a: &AnpAssertion, b: &AnpAssertion) -> Result<AnpAssertion, CompositionError> {
        Ok(anp_compose(a, b)?)
    }

    fn unit(&self) -> AnpAssertion {
        AnpAssertion::empty()
    }

    fn condition_sample(&self) -> Vec<AnpCondition> {
        self.events
            .iter()
            .map(|e| AnpCondition::done([e.clone()]))
            .chain(self.probes.iter().cloned())
            .collect()
    }

    fn executed_events(&self, assertion: &AnpAssertion) -> BTreeSet<EventId> {
        assertion.executed()
    }
}
