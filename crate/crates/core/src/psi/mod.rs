//! The parametric psi-calculus: processes, frames and labelled transitions,
//! parameterised by an [`Instance`].

mod process;
mod semantics;

use std::collections::BTreeSet;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

use crate::nominal::{Name, Nominal};
use crate::term::Term;

pub use process::Process;
pub use semantics::{
    assertion_equivalent, frame, match_pattern, transitions, transitions_with_cost, Frame,
    Transition,
};

/// Identifies one occurrence of an action in a run.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventId(Arc<str>);

impl EventId {
    pub fn new(id: &str) -> Self {
        EventId(Arc::from(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EventId {
    fn from(s: &str) -> Self {
        EventId::new(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message}")]
pub struct CompositionError {
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PsiError {
    #[error("ill-formed process: {0}")]
    WellFormedness(String),
    #[error("assertion composition failed: {0}")]
    Composition(#[from] CompositionError),
}

/// The parameters that fix a psi-calculus instance.
///
/// Laws expected of implementations: entailment of `channel_eq` is symmetric
/// and transitive, and `compose` is associative and commutative with `unit`
/// as identity, up to [`assertion_equivalent`].
pub trait Instance {
    type Condition: Nominal + Clone + Eq + Ord + Hash + Debug + Display;
    type Assertion: Nominal + Clone + Eq + Ord + Hash + Debug + Display;

    fn channel_eq(&self, m: &Term, n: &Term) -> Self::Condition;
    fn entails(&self, assertion: &Self::Assertion, condition: &Self::Condition) -> bool;
    fn compose(
        &self,
        a: &Self::Assertion,
        b: &Self::Assertion,
    ) -> Result<Self::Assertion, CompositionError>;
    fn unit(&self) -> Self::Assertion;

    /// Finite set of conditions used to approximate assertion equivalence.
    fn condition_sample(&self) -> Vec<Self::Condition>;

    /// Action occurrences recorded in an assertion. Instances without a
    /// notion of history return nothing.
    fn executed_events(&self, _assertion: &Self::Assertion) -> BTreeSet<EventId> {
        BTreeSet::new()
    }
}

/// Process type of an instance.
pub type Proc<I> = Process<<I as Instance>::Condition, <I as Instance>::Assertion>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Output {
        channel: Term,
        extruded: Vec<Name>,
        payload: Term,
    },
    Input {
        channel: Term,
        payload: Term,
    },
    Tau,
}

impl Label {
    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }

    pub fn channel(&self) -> Option<&Term> {
        match self {
            Label::Output { channel, .. } | Label::Input { channel, .. } => Some(channel),
            Label::Tau => None,
        }
    }
}

impl Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau => f.write_str("tau"),
            Label::Input { channel, payload } => write!(f, "in {channel}({payload})"),
            Label::Output {
                channel,
                extruded,
                payload,
            } => {
                write!(f, "out {channel}<")?;
                if !extruded.is_empty() {
                    f.write_str("(ν")?;
                    for n in extruded {
                        write!(f, " {n}")?;
                    }
                    f.write_str(") ")?;
                }
                write!(f, "{payload}>")
            }
        }
    }
}
