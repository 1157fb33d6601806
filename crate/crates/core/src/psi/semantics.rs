//! Frames, pattern matching and the labelled transition relation.

use std::collections::BTreeSet;

use crate::nominal::{Name, NameMap, Nominal, Substitution};
use crate::psi::{Instance, Label, Proc, Process, PsiError};
use crate::term::Term;

/// Outermost assertions of a process together with the names they are
/// bound under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame<A> {
    pub binders: Vec<Name>,
    pub assertion: A,
}

/// Computes the frame of `p`. Assertions under a prefix, a case guard or a
/// replication are not visible.
pub fn frame<I: Instance>(inst: &I, p: &Proc<I>) -> Result<Frame<I::Assertion>, PsiError> {
    match p {
        Process::Assert(a) => Ok(Frame {
            binders: Vec::new(),
            assertion: a.clone(),
        }),
        Process::Par(l, r) => {
            let fl = frame(inst, l)?;
            let mut fr = frame(inst, r)?;
            let clash: Vec<Name> = fr
                .binders
                .iter()
                .filter(|b| fl.binders.contains(b))
                .cloned()
                .collect();
            if !clash.is_empty() {
                let mut map = NameMap::new();
                for b in &clash {
                    map.insert(b.clone(), Term::Name(b.refresh()));
                }
                fr.binders = fr
                    .binders
                    .iter()
                    .map(|b| match map.get(b) {
                        Some(Term::Name(n)) => n.clone(),
                        _ => b.clone(),
                    })
                    .collect();
                fr.assertion = fr.assertion.rename_apply(&map);
            }
            let mut binders = fl.binders;
            binders.extend(fr.binders);
            Ok(Frame {
                binders,
                assertion: inst.compose(&fl.assertion, &fr.assertion)?,
            })
        }
        Process::Restrict(a, body) => {
            let mut f = frame(inst, body)?;
            f.binders.insert(0, a.clone());
            Ok(f)
        }
        Process::Nil
        | Process::Output { .. }
        | Process::Input { .. }
        | Process::Case(_)
        | Process::Replicate(_) => Ok(Frame {
            binders: Vec::new(),
            assertion: inst.unit(),
        }),
    }
}

/// One-sided syntactic matching of `value` against `(λ vars) pattern`.
pub fn match_pattern(vars: &[Name], pattern: &Term, value: &Term) -> Option<Substitution> {
    let mut map = NameMap::new();
    if !match_into(vars, pattern, value, &mut map) {
        return None;
    }
    let mut s = Substitution::new();
    for v in vars {
        let t = map.remove(v)?;
        s.insert(v.clone(), t).ok()?;
    }
    Some(s)
}

fn bind_var(v: &Name, value: Term, map: &mut NameMap) -> bool {
    match map.get(v) {
        Some(prev) => *prev == value,
        None => {
            map.insert(v.clone(), value);
            true
        }
    }
}

fn match_name(vars: &[Name], p: &Name, v: &Name, map: &mut NameMap) -> bool {
    if vars.contains(p) {
        bind_var(p, Term::Name(v.clone()), map)
    } else {
        p == v
    }
}

fn match_into(vars: &[Name], pattern: &Term, value: &Term, map: &mut NameMap) -> bool {
    match (pattern, value) {
        (Term::Name(p), _) if vars.contains(p) => bind_var(p, value.clone(), map),
        (Term::Name(p), Term::Name(v)) => p == v,
        (Term::App(f, ps), Term::App(g, vs)) => {
            f == g
                && ps.len() == vs.len()
                && ps.iter().zip(vs).all(|(p, v)| match_into(vars, p, v, map))
        }
        (Term::Channel(p), Term::Channel(v)) => {
            let ctrl = match (&p.at.controller, &v.at.controller) {
                (None, None) => true,
                (Some(a), Some(b)) => match_name(vars, a, b, map),
                _ => false,
            };
            ctrl && p.at.path.len() == v.at.path.len()
                && p.at
                    .path
                    .iter()
                    .zip(&v.at.path)
                    .all(|(a, b)| match_name(vars, a, b, map))
                && match_name(vars, &p.channel, &v.channel, map)
        }
        _ => false,
    }
}

/// Equivalence of assertions, approximated over the instance's condition
/// sample.
pub fn assertion_equivalent<I: Instance>(inst: &I, a: &I::Assertion, b: &I::Assertion) -> bool {
    inst.condition_sample()
        .iter()
        .all(|c| inst.entails(a, c) == inst.entails(b, c))
}

/// A derived transition together with the number of replication
/// unfoldings its derivation used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition<C, A> {
    pub label: Label,
    pub target: Process<C, A>,
    pub cost: usize,
}

enum Act<C, A> {
    Out {
        channel: Term,
        extruded: Vec<Name>,
        payload: Term,
        cont: Process<C, A>,
    },
    In {
        channel: Term,
        vars: Vec<Name>,
        pattern: Term,
        cont: Process<C, A>,
    },
    Tau(Process<C, A>),
}

type Step<I> = (Act<<I as Instance>::Condition, <I as Instance>::Assertion>, usize);
type Moves<I> = Vec<Transition<<I as Instance>::Condition, <I as Instance>::Assertion>>;

/// All single-step transitions of `p` in environment `context`, using at
/// most `unfold_budget` replication unfoldings.
///
/// Inputs are late: an input label carries the pattern, and the target is
/// the continuation with the pattern variables free.
pub fn transitions<I: Instance>(
    context: &I::Assertion,
    p: &Proc<I>,
    inst: &I,
    unfold_budget: usize,
) -> Result<Vec<(Label, Proc<I>)>, PsiError> {
    Ok(transitions_with_cost(context, p, inst, unfold_budget)?
        .into_iter()
        .map(|t| (t.label, t.target))
        .collect())
}

pub fn transitions_with_cost<I: Instance>(
    context: &I::Assertion,
    p: &Proc<I>,
    inst: &I,
    unfold_budget: usize,
) -> Result<Moves<I>, PsiError> {
    p.check_well_formed()?;
    Ok(steps(inst, context, p, unfold_budget)?
        .into_iter()
        .map(|(act, cost)| match act {
            Act::Out {
                channel,
                extruded,
                payload,
                cont,
            } => Transition {
                label: Label::Output {
                    channel,
                    extruded,
                    payload,
                },
                target: cont,
                cost,
            },
            Act::In {
                channel,
                pattern,
                cont,
                ..
            } => Transition {
                label: Label::Input {
                    channel,
                    payload: pattern,
                },
                target: cont,
                cost,
            },
            Act::Tau(cont) => Transition {
                label: Label::Tau,
                target: cont,
                cost,
            },
        })
        .collect())
}

fn steps<I: Instance>(
    inst: &I,
    ctx: &I::Assertion,
    p: &Proc<I>,
    budget: usize,
) -> Result<Vec<Step<I>>, PsiError> {
    match p {
        Process::Nil | Process::Assert(_) => Ok(Vec::new()),
        Process::Output {
            channel,
            payload,
            cont,
        } => Ok(vec![(
            Act::Out {
                channel: channel.clone(),
                extruded: Vec::new(),
                payload: payload.clone(),
                cont: (**cont).clone(),
            },
            0,
        )]),
        Process::Input {
            channel,
            vars,
            pattern,
            cont,
        } => {
            // Pattern variables are renamed apart so that later
            // substitution into a larger context cannot capture.
            let mut map = NameMap::new();
            let vars: Vec<Name> = vars
                .iter()
                .map(|v| {
                    let f = v.refresh();
                    map.insert(v.clone(), Term::Name(f.clone()));
                    f
                })
                .collect();
            Ok(vec![(
                Act::In {
                    channel: channel.clone(),
                    vars,
                    pattern: pattern.rename_apply(&map),
                    cont: cont.subst_map(&map),
                },
                0,
            )])
        }
        Process::Case(branches) => {
            let mut out = Vec::new();
            for (cond, branch) in branches {
                if inst.entails(ctx, cond) {
                    out.extend(steps(inst, ctx, branch, budget)?);
                }
            }
            Ok(out)
        }
        Process::Restrict(a, body) => {
            let mut out = Vec::new();
            for (act, cost) in steps(inst, ctx, body, budget)? {
                let act = match act {
                    Act::Tau(cont) => Act::Tau(Process::restrict(a.clone(), cont)),
                    Act::Out {
                        channel,
                        mut extruded,
                        payload,
                        cont,
                    } => {
                        if channel.mentions(a) {
                            continue;
                        }
                        if payload.mentions(a) {
                            extruded.insert(0, a.clone());
                            Act::Out {
                                channel,
                                extruded,
                                payload,
                                cont,
                            }
                        } else {
                            Act::Out {
                                channel,
                                extruded,
                                payload,
                                cont: Process::restrict(a.clone(), cont),
                            }
                        }
                    }
                    Act::In {
                        channel,
                        vars,
                        pattern,
                        cont,
                    } => {
                        if channel.mentions(a) || pattern.mentions(a) {
                            continue;
                        }
                        Act::In {
                            channel,
                            vars,
                            pattern,
                            cont: Process::restrict(a.clone(), cont),
                        }
                    }
                };
                out.push((act, cost));
            }
            Ok(out)
        }
        Process::Par(left, right) => par_steps(inst, ctx, left, right, budget),
        Process::Replicate(body) => {
            if budget == 0 {
                return Ok(Vec::new());
            }
            let unfolded = Process::par(body.freshen_binders(), p.clone());
            Ok(steps(inst, ctx, &unfolded, budget - 1)?
                .into_iter()
                .map(|(act, cost)| (act, cost + 1))
                .collect())
        }
    }
}

/// Renames extruded names that clash with `avoid` in the payload and
/// continuation.
fn apart<C, A>(
    extruded: Vec<Name>,
    payload: Term,
    cont: Process<C, A>,
    avoid: &BTreeSet<Name>,
) -> (Vec<Name>, Term, Process<C, A>)
where
    C: Nominal + Clone + Ord,
    A: Nominal + Clone + Ord,
{
    if extruded.iter().all(|n| !avoid.contains(n)) {
        return (extruded, payload, cont);
    }
    let mut map = NameMap::new();
    let renamed = extruded
        .into_iter()
        .map(|n| {
            if avoid.contains(&n) {
                let f = n.refresh();
                map.insert(n, Term::Name(f.clone()));
                f
            } else {
                n
            }
        })
        .collect();
    (renamed, payload.rename_apply(&map), cont.subst_map(&map))
}

fn par_steps<I: Instance>(
    inst: &I,
    ctx: &I::Assertion,
    left: &Proc<I>,
    right: &Proc<I>,
    budget: usize,
) -> Result<Vec<Step<I>>, PsiError> {
    let fl = frame(inst, left)?;
    let fr = frame(inst, right)?;
    let ctx_left = inst.compose(&fr.assertion, ctx)?;
    let ctx_right = inst.compose(&fl.assertion, ctx)?;
    let ctx_both = inst.compose(&inst.compose(&fr.assertion, &fl.assertion)?, ctx)?;
    let left_steps = steps(inst, &ctx_left, left, budget)?;
    let right_steps = steps(inst, &ctx_right, right, budget)?;
    let fn_left = left.free_names();
    let fn_right = right.free_names();

    let mut out = Vec::new();
    // Communication.
    for (ls, lc) in &left_steps {
        for (rs, rc) in &right_steps {
            if lc + rc > budget {
                continue;
            }
            if let Some(tau) = communicate(inst, &ctx_both, ls, rs, &fn_right, false) {
                out.push((Act::Tau(tau), lc + rc));
            }
            if let Some(tau) = communicate(inst, &ctx_both, rs, ls, &fn_left, true) {
                out.push((Act::Tau(tau), lc + rc));
            }
        }
    }
    // Interleaving.
    let lift = |act: Act<I::Condition, I::Assertion>,
                other: &Proc<I>,
                other_fn: &BTreeSet<Name>,
                on_left: bool|
     -> Act<I::Condition, I::Assertion> {
        let wrap = |cont: Proc<I>| {
            if on_left {
                Process::par(cont, other.clone())
            } else {
                Process::par(other.clone(), cont)
            }
        };
        match act {
            Act::Tau(cont) => Act::Tau(wrap(cont)),
            Act::Out {
                channel,
                extruded,
                payload,
                cont,
            } => {
                let (extruded, payload, cont) = apart(extruded, payload, cont, other_fn);
                Act::Out {
                    channel,
                    extruded,
                    payload,
                    cont: wrap(cont),
                }
            }
            Act::In {
                channel,
                vars,
                pattern,
                cont,
            } => Act::In {
                channel,
                vars,
                pattern,
                cont: wrap(cont),
            },
        }
    };
    for (act, cost) in left_steps {
        out.push((lift(act, right, &fn_right, true), cost));
    }
    for (act, cost) in right_steps {
        out.push((lift(act, left, &fn_left, false), cost));
    }
    Ok(out)
}

/// Synchronises output `out` with input `inp`, whose side has free names
/// `in_fn`. `swapped` means the output came from the right operand.
fn communicate<I: Instance>(
    inst: &I,
    ctx: &I::Assertion,
    out: &Act<I::Condition, I::Assertion>,
    inp: &Act<I::Condition, I::Assertion>,
    in_fn: &BTreeSet<Name>,
    swapped: bool,
) -> Option<Proc<I>> {
    let (
        Act::Out {
            channel: m,
            extruded,
            payload,
            cont: out_cont,
        },
        Act::In {
            channel: k,
            vars,
            pattern,
            cont: in_cont,
        },
    ) = (out, inp)
    else {
        return None;
    };
    if !inst.entails(ctx, &inst.channel_eq(m, k)) {
        return None;
    }
    let (extruded, payload, out_cont) =
        apart(extruded.clone(), payload.clone(), out_cont.clone(), in_fn);
    let sigma = match_pattern(vars, pattern, &payload)?;
    let received = in_cont.substitute(&sigma);
    let body = if swapped {
        Process::par(received, out_cont)
    } else {
        Process::par(out_cont, received)
    };
    Some(Process::restrict_all(extruded, body))
}
