//! Terms: message trees over a user signature, configuration paths, and
//! channels attached to configurations.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::nominal::{map_name, Name, NameMap, Nominal, Substitution};

/// Constructor symbol of the message signature.
pub type Symbol = Arc<str>;

/// Reserved constructor used for polyadic communication.
pub const TUPLE: &str = "tuple";

/// A configuration named by its ancestor-first path, optionally paired with
/// the identity controlling it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigPath {
    pub controller: Option<Name>,
    pub path: Vec<Name>,
}

/// A channel name attached to a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelTerm {
    pub at: ConfigPath,
    pub channel: Name,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Name(Name),
    App(Symbol, Vec<Term>),
    Channel(ChannelTerm),
}

impl Term {
    pub fn app(symbol: &str, args: Vec<Term>) -> Term {
        Term::App(Arc::from(symbol), args)
    }

    pub fn tuple(args: Vec<Term>) -> Term {
        Term::app(TUPLE, args)
    }

    pub fn as_name(&self) -> Option<&Name> {
        match self {
            Term::Name(n) => Some(n),
            _ => None,
        }
    }

    /// True if no variable-sorted name occurs in the term.
    pub fn is_ground(&self) -> bool {
        self.names().iter().all(|n| !n.is_variable())
    }

    /// Number of constructor nodes, counting each kind of node once.
    pub fn shape(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.shape_into(&mut out);
        out
    }

    fn shape_into(&self, out: &mut Vec<String>) {
        match self {
            Term::Name(_) => out.push("name".into()),
            Term::App(f, args) => {
                out.push(format!("{f}/{}", args.len()));
                for a in args {
                    a.shape_into(out);
                }
            }
            Term::Channel(c) => out.push(format!(
                "chan/{}/{}",
                c.at.controller.is_some(),
                c.at.path.len()
            )),
        }
    }

    pub fn substitute(&self, s: &Substitution) -> Term {
        self.rename_apply(s.as_map())
    }
}

impl Nominal for ConfigPath {
    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        out.extend(self.controller.iter().cloned());
        out.extend(self.path.iter().cloned());
    }

    fn rename_apply(&self, map: &NameMap) -> Self {
        ConfigPath {
            controller: self.controller.as_ref().map(|n| map_name(n, map)),
            path: self.path.iter().map(|n| map_name(n, map)).collect(),
        }
    }
}

impl Nominal for ChannelTerm {
    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        self.at.collect_names(out);
        out.insert(self.channel.clone());
    }

    fn rename_apply(&self, map: &NameMap) -> Self {
        ChannelTerm {
            at: self.at.rename_apply(map),
            channel: map_name(&self.channel, map),
        }
    }
}

impl Nominal for Term {
    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Name(n) => {
                out.insert(n.clone());
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_names(out);
                }
            }
            Term::Channel(c) => c.collect_names(out),
        }
    }

    fn rename_apply(&self, map: &NameMap) -> Self {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Term::Name(n) => map.get(n).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.rename_apply(map)).collect())
            }
            Term::Channel(c) => Term::Channel(c.rename_apply(map)),
        }
    }
}

impl fmt::Display for ConfigPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = &self.controller {
            write!(f, "{c}")?;
        }
        f.write_str("[")?;
        for (i, l) in self.path.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for ChannelTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.at, self.channel)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(n) => write!(f, "{n}"),
            Term::Channel(c) => write!(f, "{c}"),
            Term::App(sym, args) => {
                if &**sym != TUPLE {
                    f.write_str(sym)?;
                }
                if &**sym != TUPLE && args.is_empty() {
                    return Ok(());
                }
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
