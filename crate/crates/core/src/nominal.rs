//! Sorted names, fresh-name supply, and name-level substitution.
//!
//! Every atom in the engine is a [`Name`]. Two names are equal exactly when
//! their identifiers are equal; the display hint is only for printing. Names
//! are minted from a single process-wide counter, so a name handed out by
//! [`fresh_name`] is distinct from every name created before it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::term::Term;

/// The nominal sets a name can belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Configuration,
    Channel,
    Identity,
    Message,
    Variable,
}

impl Sort {
    fn default_hint(self) -> &'static str {
        match self {
            Sort::Configuration => "l",
            Sort::Channel => "c",
            Sort::Identity => "i",
            Sort::Message => "n",
            Sort::Variable => "x",
        }
    }
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Identifiers at or above this value are reserved for canonical binder
/// names produced by normal-form computation; the counter never reaches it.
const CANONICAL_BASE: u64 = 1 << 62;

#[derive(Clone)]
pub struct Name {
    id: u64,
    sort: Sort,
    hint: Arc<str>,
}

impl Name {
    /// Mints a new name. Distinct from every previously minted name.
    pub fn new(sort: Sort, hint: &str) -> Name {
        let id = NEXT_ID.fetch_add(1, Ordering::Relaxed);
        assert!(id < CANONICAL_BASE, "name supply exhausted");
        Name {
            id,
            sort,
            hint: Arc::from(hint),
        }
    }

    /// A fresh name with the same sort and display hint.
    pub fn refresh(&self) -> Name {
        Name {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            sort: self.sort,
            hint: self.hint.clone(),
        }
    }

    pub(crate) fn canonical(level: usize, sort: Sort) -> Name {
        Name {
            id: CANONICAL_BASE + level as u64,
            sort,
            hint: Arc::from(format!("_{level}")),
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn hint(&self) -> &str {
        &self.hint
    }

    pub fn is_variable(&self) -> bool {
        self.sort == Sort::Variable
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.id.cmp(&other.id)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.hint, self.id)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hint)
    }
}

/// Returns a name of the requested sort that is not in `avoid` and has never
/// been returned before.
pub fn fresh_name(sort: Sort, avoid: &BTreeSet<Name>) -> Name {
    loop {
        let n = Name::new(sort, sort.default_hint());
        if !avoid.contains(&n) {
            return n;
        }
    }
}

/// Unchecked name-to-term map used for renaming and substitution.
///
/// Positions that can only hold a name (path entries, channel names,
/// controllers) are rewritten only when the image is itself a name.
pub type NameMap = BTreeMap<Name, Term>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NominalError {
    #[error("substitution domain must be variable-sorted, got `{0:?}`")]
    NotAVariable(Name),
}

/// A finite map from variable-sorted names to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: NameMap,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(var: Name, term: Term) -> Result<Self, NominalError> {
        let mut s = Self::new();
        s.insert(var, term)?;
        Ok(s)
    }

    pub fn insert(&mut self, var: Name, term: Term) -> Result<(), NominalError> {
        if !var.is_variable() {
            return Err(NominalError::NotAVariable(var));
        }
        self.map.insert(var, term);
        Ok(())
    }

    pub fn get(&self, var: &Name) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.map.iter()
    }

    /// Free names of the range.
    pub fn range_names(&self) -> BTreeSet<Name> {
        range_names(&self.map)
    }

    pub fn as_map(&self) -> &NameMap {
        &self.map
    }
}

pub(crate) fn range_names(map: &NameMap) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for t in map.values() {
        t.collect_names(&mut out);
    }
    out
}

/// Binder-free syntax that carries names.
pub trait Nominal: Sized {
    fn collect_names(&self, out: &mut BTreeSet<Name>);

    /// Replaces names according to `map`. There are no binders, so this is
    /// plain structural replacement.
    fn rename_apply(&self, map: &NameMap) -> Self;

    fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn mentions(&self, n: &Name) -> bool {
        self.names().contains(n)
    }
}

pub(crate) fn map_name(n: &Name, map: &NameMap) -> Name {
    match map.get(n) {
        Some(Term::Name(m)) => m.clone(),
        _ => n.clone(),
    }
}

impl<T: Nominal + Ord + Clone> Nominal for BTreeSet<T> {
    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        for t in self {
            t.collect_names(out);
        }
    }

    fn rename_apply(&self, map: &NameMap) -> Self {
        self.iter().map(|t| t.rename_apply(map)).collect()
    }
}
