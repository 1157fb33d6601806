//! The pi-calculus as a psi-calculus instance: terms are names, the only
//! assertion is the unit, and channel equality is name identity.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::nominal::{Name, NameMap, Nominal, Sort};
use crate::psi::{CompositionError, Instance, Process};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PiCondition {
    Eq(Term, Term),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiAssertion;

pub type PiPsiProcess = Process<PiCondition, PiAssertion>;

impl Nominal for PiCondition {
    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        let PiCondition::Eq(a, b) = self;
        a.collect_names(out);
        b.collect_names(out);
    }

    fn rename_apply(&self, map: &NameMap) -> Self {
        let PiCondition::Eq(a, b) = self;
        PiCondition::Eq(a.rename_apply(map), b.rename_apply(map))
    }
}

impl Nominal for PiAssertion {
    fn collect_names(&self, _out: &mut BTreeSet<Name>) {}

    fn rename_apply(&self, _map: &NameMap) -> Self {
        PiAssertion
    }
}

impl fmt::Display for PiCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let PiCondition::Eq(a, b) = self;
        write!(f, "{a} = {b}")
    }
}

impl fmt::Display for PiAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("1")
    }
}

#[derive(Clone, Debug)]
pub struct PiInstance {
    universe: BTreeSet<Name>,
}

impl PiInstance {
    pub fn universe(&self) -> &BTreeSet<Name> {
        &self.universe
    }

    /// Instance whose condition sample ranges over the free names of `p`
    /// plus two reserved names.
    pub fn for_process(p: &PiProcess) -> Self {
        make_pi_instance(p.free_names())
    }
}

/// Builds the pi instance over `names` extended with two reserved fresh
/// names.
pub fn make_pi_instance(names: impl IntoIterator<Item = Name>) -> PiInstance {
    let mut universe: BTreeSet<Name> = names.into_iter().collect();
    universe.insert(Name::new(Sort::Channel, "r0"));
    universe.insert(Name::new(Sort::Channel, "r1"));
    PiInstance { universe }
}

impl Instance for PiInstance {
    type Condition = PiCondition;
    type Assertion = PiAssertion;

    fn channel_eq(&self, m: &Term, n: &Term) -> PiCondition {
        PiCondition::Eq(m.clone(), n.clone())
    }

    fn entails(&self, _assertion: &PiAssertion, condition: &PiCondition) -> bool {
        let PiCondition::Eq(a, b) = condition;
        matches!((a, b), (Term::Name(x), Term::Name(y)) if x == y)
    }

    fn compose(&self, _a: &PiAssertion, _b: &PiAssertion) -> Result<PiAssertion, CompositionError> {
        Ok(PiAssertion)
    }

    fn unit(&self) -> PiAssertion {
        PiAssertion
    }

    fn condition_sample(&self) -> Vec<PiCondition> {
        let mut out = Vec::new();
        for a in &self.universe {
            for b in &self.universe {
                out.push(PiCondition::Eq(Term::Name(a.clone()), Term::Name(b.clone())));
            }
        }
        out
    }
}

/// The name used to build the always-true condition `tt = tt`.
pub fn tautology_name() -> &'static Name {
    static TT: OnceLock<Name> = OnceLock::new();
    TT.get_or_init(|| Name::new(Sort::Channel, "tt"))
}

pub fn tautology() -> PiCondition {
    let t = Term::Name(tautology_name().clone());
    PiCondition::Eq(t.clone(), t)
}

/// Monadic pi-calculus with binary choice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PiProcess {
    Nil,
    /// `a<b>.P`
    Out(Name, Name, Box<PiProcess>),
    /// `a(x).P`, binding `x`.
    In(Name, Name, Box<PiProcess>),
    Sum(Box<PiProcess>, Box<PiProcess>),
    Par(Box<PiProcess>, Box<PiProcess>),
    New(Name, Box<PiProcess>),
    Rep(Box<PiProcess>),
    /// `[a=b]P`; outside the encoded fragment.
    Match(Name, Name, Box<PiProcess>),
}

impl PiProcess {
    pub fn free_names(&self) -> BTreeSet<Name> {
        match self {
            PiProcess::Nil => BTreeSet::new(),
            PiProcess::Out(a, b, p) => {
                let mut s = p.free_names();
                s.insert(a.clone());
                s.insert(b.clone());
                s
            }
            PiProcess::In(a, x, p) => {
                let mut s = p.free_names();
                s.remove(x);
                s.insert(a.clone());
                s
            }
            PiProcess::Sum(p, q) | PiProcess::Par(p, q) => {
                let mut s = p.free_names();
                s.extend(q.free_names());
                s
            }
            PiProcess::New(a, p) => {
                let mut s = p.free_names();
                s.remove(a);
                s
            }
            PiProcess::Rep(p) => p.free_names(),
            PiProcess::Match(a, b, p) => {
                let mut s = p.free_names();
                s.insert(a.clone());
                s.insert(b.clone());
                s
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("unsupported pi-calculus construct: {0}")]
    UnsupportedConstruct(&'static str),
}

/// Encodes a pi-process: `a(x).P` becomes `a(λx)x.P` and `P + Q` becomes a
/// case over two tautologies.
pub fn encode_pi(p: &PiProcess) -> Result<PiPsiProcess, EncodeError> {
    Ok(match p {
        PiProcess::Nil => Process::Nil,
        PiProcess::Out(a, b, k) => {
            Process::output(Term::Name(a.clone()), Term::Name(b.clone()), encode_pi(k)?)
        }
        PiProcess::In(a, x, k) => {
            let cont = encode_pi(k)?;
            let (var, cont) = if x.is_variable() {
                (x.clone(), cont)
            } else {
                let v = Name::new(Sort::Variable, x.hint());
                let mut map = NameMap::new();
                map.insert(x.clone(), Term::Name(v.clone()));
                (v, cont.subst_map(&map))
            };
            Process::input(
                Term::Name(a.clone()),
                vec![var.clone()],
                Term::Name(var),
                cont,
            )
        }
        PiProcess::Sum(l, r) => Process::Case(vec![
            (tautology(), encode_pi(l)?),
            (tautology(), encode_pi(r)?),
        ]),
        PiProcess::Par(l, r) => Process::par(encode_pi(l)?, encode_pi(r)?),
        PiProcess::New(a, k) => Process::restrict(a.clone(), encode_pi(k)?),
        PiProcess::Rep(k) => Process::replicate(encode_pi(k)?),
        PiProcess::Match(..) => return Err(EncodeError::UnsupportedConstruct("match")),
    })
}
