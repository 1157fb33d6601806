use std::collections::BTreeSet;
use std::fmt::{self, Display};

use crate::nominal::{range_names, Name, NameMap, Nominal, Substitution};
use crate::psi::PsiError;
use crate::term::Term;

/// Psi-process syntax, generic over the condition and assertion types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process<C, A> {
    Nil,
    Output {
        channel: Term,
        payload: Term,
        cont: Box<Process<C, A>>,
    },
    /// Input with pattern `(λ vars) pattern`; `vars` bind in the pattern and
    /// in the continuation.
    Input {
        channel: Term,
        vars: Vec<Name>,
        pattern: Term,
        cont: Box<Process<C, A>>,
    },
    Case(Vec<(C, Process<C, A>)>),
    Restrict(Name, Box<Process<C, A>>),
    Par(Box<Process<C, A>>, Box<Process<C, A>>),
    Replicate(Box<Process<C, A>>),
    Assert(A),
}

impl<C, A> Process<C, A>
where
    C: Nominal + Clone + Ord,
    A: Nominal + Clone + Ord,
{
    pub fn output(channel: Term, payload: Term, cont: Self) -> Self {
        Process::Output {
            channel,
            payload,
            cont: Box::new(cont),
        }
    }

    pub fn input(channel: Term, vars: Vec<Name>, pattern: Term, cont: Self) -> Self {
        Process::Input {
            channel,
            vars,
            pattern,
            cont: Box::new(cont),
        }
    }

    pub fn restrict(name: Name, body: Self) -> Self {
        Process::Restrict(name, Box::new(body))
    }

    pub fn restrict_all(names: impl IntoIterator<Item = Name>, body: Self) -> Self {
        let names: Vec<Name> = names.into_iter().collect();
        names
            .into_iter()
            .rev()
            .fold(body, |acc, n| Process::restrict(n, acc))
    }

    pub fn par(left: Self, right: Self) -> Self {
        Process::Par(Box::new(left), Box::new(right))
    }

    /// Right-nested parallel composition; `Nil` when empty.
    pub fn par_all(items: impl IntoIterator<Item = Self>) -> Self {
        let mut items: Vec<Self> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Process::Nil;
        };
        while let Some(p) = items.pop() {
            acc = Process::par(p, acc);
        }
        acc
    }

    pub fn replicate(body: Self) -> Self {
        Process::Replicate(Box::new(body))
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Process::Nil => {}
            Process::Assert(a) => a.collect_names(out),
            Process::Output {
                channel,
                payload,
                cont,
            } => {
                channel.collect_names(out);
                payload.collect_names(out);
                cont.collect_free(out);
            }
            Process::Input {
                channel,
                vars,
                pattern,
                cont,
            } => {
                channel.collect_names(out);
                let mut inner = pattern.names();
                cont.collect_free(&mut inner);
                for v in vars {
                    inner.remove(v);
                }
                out.extend(inner);
            }
            Process::Case(branches) => {
                for (c, p) in branches {
                    c.collect_names(out);
                    p.collect_free(out);
                }
            }
            Process::Restrict(a, body) => {
                let mut inner = body.free_names();
                inner.remove(a);
                out.extend(inner);
            }
            Process::Par(p, q) => {
                p.collect_free(out);
                q.collect_free(out);
            }
            Process::Replicate(p) => p.collect_free(out),
        }
    }

    /// Capture-avoiding substitution.
    pub fn substitute(&self, s: &Substitution) -> Self {
        self.subst_map(s.as_map())
    }

    pub(crate) fn subst_map(&self, map: &NameMap) -> Self {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Process::Nil => Process::Nil,
            Process::Assert(a) => Process::Assert(a.rename_apply(map)),
            Process::Output {
                channel,
                payload,
                cont,
            } => Process::output(
                channel.rename_apply(map),
                payload.rename_apply(map),
                cont.subst_map(map),
            ),
            Process::Input {
                channel,
                vars,
                pattern,
                cont,
            } => {
                let channel = channel.rename_apply(map);
                let mut inner = map.clone();
                let vars: Vec<Name> = vars.iter().map(|v| bind(v, &mut inner)).collect();
                Process::input(
                    channel,
                    vars,
                    pattern.rename_apply(&inner),
                    cont.subst_map(&inner),
                )
            }
            Process::Case(branches) => Process::Case(
                branches
                    .iter()
                    .map(|(c, p)| (c.rename_apply(map), p.subst_map(map)))
                    .collect(),
            ),
            Process::Restrict(a, body) => {
                let mut inner = map.clone();
                let a = bind(a, &mut inner);
                Process::restrict(a, body.subst_map(&inner))
            }
            Process::Par(p, q) => Process::par(p.subst_map(map), q.subst_map(map)),
            Process::Replicate(p) => Process::replicate(p.subst_map(map)),
        }
    }

    /// Renames every binder in the process to a fresh name.
    pub fn freshen_binders(&self) -> Self {
        match self {
            Process::Nil | Process::Assert(_) => self.clone(),
            Process::Output {
                channel,
                payload,
                cont,
            } => Process::output(channel.clone(), payload.clone(), cont.freshen_binders()),
            Process::Input {
                channel,
                vars,
                pattern,
                cont,
            } => {
                let mut map = NameMap::new();
                let fresh: Vec<Name> = vars
                    .iter()
                    .map(|v| {
                        let f = v.refresh();
                        map.insert(v.clone(), Term::Name(f.clone()));
                        f
                    })
                    .collect();
                Process::input(
                    channel.clone(),
                    fresh,
                    pattern.rename_apply(&map),
                    cont.subst_map(&map).freshen_binders(),
                )
            }
            Process::Case(branches) => Process::Case(
                branches
                    .iter()
                    .map(|(c, p)| (c.clone(), p.freshen_binders()))
                    .collect(),
            ),
            Process::Restrict(a, body) => {
                let f = a.refresh();
                let mut map = NameMap::new();
                map.insert(a.clone(), Term::Name(f.clone()));
                Process::restrict(f, body.subst_map(&map).freshen_binders())
            }
            Process::Par(p, q) => Process::par(p.freshen_binders(), q.freshen_binders()),
            Process::Replicate(p) => Process::replicate(p.freshen_binders()),
        }
    }

    /// Binders replaced by canonical level-indexed names.
    pub fn alpha_canonical(&self) -> Self {
        self.canon(0, &NameMap::new(), false)
    }

    /// Alpha-canonical form that additionally flattens parallel composition,
    /// drops `Nil` components and sorts the remaining ones.
    pub fn normal_form(&self) -> Self {
        self.canon(0, &NameMap::new(), true)
    }

    pub fn alpha_equivalent(&self, other: &Self) -> bool {
        self.alpha_canonical() == other.alpha_canonical()
    }

    fn canon(&self, level: usize, env: &NameMap, ac: bool) -> Self {
        match self {
            Process::Nil => Process::Nil,
            Process::Assert(a) => Process::Assert(a.rename_apply(env)),
            Process::Output {
                channel,
                payload,
                cont,
            } => Process::output(
                channel.rename_apply(env),
                payload.rename_apply(env),
                cont.canon(level, env, ac),
            ),
            Process::Input {
                channel,
                vars,
                pattern,
                cont,
            } => {
                let channel = channel.rename_apply(env);
                let mut inner = env.clone();
                let vars: Vec<Name> = vars
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let c = Name::canonical(level + i, v.sort());
                        inner.insert(v.clone(), Term::Name(c.clone()));
                        c
                    })
                    .collect();
                let next = level + vars.len();
                Process::input(
                    channel,
                    vars,
                    pattern.rename_apply(&inner),
                    cont.canon(next, &inner, ac),
                )
            }
            Process::Case(branches) => Process::Case(
                branches
                    .iter()
                    .map(|(c, p)| (c.rename_apply(env), p.canon(level, env, ac)))
                    .collect(),
            ),
            Process::Restrict(a, body) => {
                let c = Name::canonical(level, a.sort());
                let mut inner = env.clone();
                inner.insert(a.clone(), Term::Name(c.clone()));
                Process::restrict(c, body.canon(level + 1, &inner, ac))
            }
            Process::Par(p, q) if ac => {
                let mut parts = Vec::new();
                for part in [p, q] {
                    match part.canon(level, env, ac) {
                        Process::Nil => {}
                        Process::Par(l, r) => {
                            flatten_par(*l, &mut parts);
                            flatten_par(*r, &mut parts);
                        }
                        other => parts.push(other),
                    }
                }
                parts.sort();
                Process::par_all(parts)
            }
            Process::Par(p, q) => Process::par(p.canon(level, env, ac), q.canon(level, env, ac)),
            Process::Replicate(p) => Process::replicate(p.canon(level, env, ac)),
        }
    }

    /// Input pattern variables must be variable-sorted, pairwise distinct
    /// and occur in the pattern.
    pub fn check_well_formed(&self) -> Result<(), PsiError> {
        match self {
            Process::Nil | Process::Assert(_) => Ok(()),
            Process::Output { cont, .. } => cont.check_well_formed(),
            Process::Input {
                vars,
                pattern,
                cont,
                ..
            } => {
                let in_pattern = pattern.names();
                let mut seen = BTreeSet::new();
                for v in vars {
                    if !v.is_variable() {
                        return Err(PsiError::WellFormedness(format!(
                            "pattern binder `{v}` is not a variable"
                        )));
                    }
                    if !seen.insert(v.clone()) {
                        return Err(PsiError::WellFormedness(format!(
                            "pattern variable `{v}` bound twice"
                        )));
                    }
                    if !in_pattern.contains(v) {
                        return Err(PsiError::WellFormedness(format!(
                            "pattern variable `{v}` does not occur in pattern `{pattern}`"
                        )));
                    }
                }
                cont.check_well_formed()
            }
            Process::Case(branches) => branches.iter().try_for_each(|(_, p)| p.check_well_formed()),
            Process::Restrict(_, body) => body.check_well_formed(),
            Process::Par(p, q) => {
                p.check_well_formed()?;
                q.check_well_formed()
            }
            Process::Replicate(p) => p.check_well_formed(),
        }
    }

    /// Constructor names in pre-order, leaves omitted.
    pub fn constructors(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        self.constructors_into(&mut out);
        out
    }

    fn constructors_into(&self, out: &mut Vec<&'static str>) {
        match self {
            Process::Nil => out.push("nil"),
            Process::Assert(_) => out.push("assert"),
            Process::Output { cont, .. } => {
                out.push("out");
                cont.constructors_into(out);
            }
            Process::Input { cont, .. } => {
                out.push("in");
                cont.constructors_into(out);
            }
            Process::Case(bs) => {
                out.push("case");
                for (_, p) in bs {
                    p.constructors_into(out);
                }
            }
            Process::Restrict(_, b) => {
                out.push("new");
                b.constructors_into(out);
            }
            Process::Par(p, q) => {
                out.push("par");
                p.constructors_into(out);
                q.constructors_into(out);
            }
            Process::Replicate(p) => {
                out.push("rep");
                p.constructors_into(out);
            }
        }
    }
}

fn flatten_par<C, A>(p: Process<C, A>, out: &mut Vec<Process<C, A>>) {
    match p {
        Process::Par(l, r) => {
            flatten_par(*l, out);
            flatten_par(*r, out);
        }
        Process::Nil => {}
        other => out.push(other),
    }
}

/// Prepares `binder` for going under it with `map`: shadowed entries are
/// dropped and the binder is renamed when it would capture a range name.
fn bind(binder: &Name, map: &mut NameMap) -> Name {
    map.remove(binder);
    if map.is_empty() || !range_names(map).contains(binder) {
        return binder.clone();
    }
    let fresh = binder.refresh();
    map.insert(binder.clone(), Term::Name(fresh.clone()));
    fresh
}

impl<C: Display, A: Display> Process<C, A> {
    fn write_indented(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        match self {
            Process::Nil => write!(f, "{pad}0"),
            Process::Assert(a) => write!(f, "{pad}{{| {a} |}}"),
            Process::Output {
                channel,
                payload,
                cont,
            } => {
                writeln!(f, "{pad}out {channel}<{payload}>.")?;
                cont.write_indented(f, indent)
            }
            Process::Input {
                channel,
                vars,
                pattern,
                cont,
            } => {
                write!(f, "{pad}in {channel}(λ")?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                writeln!(f, "){pattern}.")?;
                cont.write_indented(f, indent)
            }
            Process::Case(branches) => {
                write!(f, "{pad}case")?;
                for (i, (c, p)) in branches.iter().enumerate() {
                    if i > 0 {
                        write!(f, "\n{pad}[]")?;
                    }
                    writeln!(f, " {c} :")?;
                    p.write_indented(f, indent + 1)?;
                }
                Ok(())
            }
            Process::Restrict(a, body) => {
                writeln!(f, "{pad}ν {a}.")?;
                body.write_indented(f, indent)
            }
            Process::Par(_, _) => {
                let mut parts = Vec::new();
                collect_par_refs(self, &mut parts);
                writeln!(f, "{pad}(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        writeln!(f, "\n{pad}|")?;
                    }
                    p.write_indented(f, indent + 1)?;
                }
                write!(f, "\n{pad})")
            }
            Process::Replicate(p) => {
                writeln!(f, "{pad}!")?;
                p.write_indented(f, indent + 1)
            }
        }
    }
}

fn collect_par_refs<'a, C, A>(p: &'a Process<C, A>, out: &mut Vec<&'a Process<C, A>>) {
    match p {
        Process::Par(l, r) => {
            collect_par_refs(l, out);
            collect_par_refs(r, out);
        }
        other => out.push(other),
    }
}

impl<C: Display, A: Display> Display for Process<C, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}
