//! A direct late-semantics reducer for monadic pi processes, written
//! without the psi machinery, used to cross-check the encoding.

use std::collections::{BTreeMap, BTreeSet};

use anp_psi::analyzer::{explore, ExploreConfig};
use anp_psi::nominal::{Name, Sort};
use anp_psi::pi::{encode_pi, make_pi_instance, PiProcess};
use anp_psi::psi::Label;
use anp_psi::term::Term;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Act {
    /// channel, payload, payload is extruded
    Out(Name, Name, bool),
    In(Name, Name),
    Tau,
}

fn rename(p: &PiProcess, from: &Name, to: &Name) -> PiProcess {
    use PiProcess::*;
    let r = |n: &Name| if n == from { to.clone() } else { n.clone() };
    match p {
        Nil => Nil,
        Out(a, b, k) => Out(r(a), r(b), Box::new(rename(k, from, to))),
        In(a, x, k) if x == from => In(r(a), x.clone(), k.clone()),
        In(a, x, k) if x == to => {
            let y = Name::new(x.sort(), x.hint());
            let k = rename(k, x, &y);
            In(r(a), y, Box::new(rename(&k, from, to)))
        }
        In(a, x, k) => In(r(a), x.clone(), Box::new(rename(k, from, to))),
        Sum(l, q) => Sum(Box::new(rename(l, from, to)), Box::new(rename(q, from, to))),
        Par(l, q) => Par(Box::new(rename(l, from, to)), Box::new(rename(q, from, to))),
        New(a, k) if a == from => New(a.clone(), k.clone()),
        New(a, k) if a == to => {
            let b = Name::new(a.sort(), a.hint());
            let k = rename(k, a, &b);
            New(b, Box::new(rename(&k, from, to)))
        }
        New(a, k) => New(a.clone(), Box::new(rename(k, from, to))),
        Rep(k) => Rep(Box::new(rename(k, from, to))),
        Match(a, b, k) => Match(r(a), r(b), Box::new(rename(k, from, to))),
    }
}

/// Single steps with the number of replication unfoldings each used.
pub fn steps(p: &PiProcess, budget: usize) -> Vec<(Act, PiProcess, usize)> {
    use PiProcess::*;
    match p {
        Nil => vec![],
        Out(a, b, k) => vec![(Act::Out(a.clone(), b.clone(), false), (**k).clone(), 0)],
        In(a, x, k) => {
            let y = Name::new(Sort::Variable, x.hint());
            vec![(Act::In(a.clone(), y.clone()), rename(k, x, &y), 0)]
        }
        Sum(l, r) => {
            let mut v = steps(l, budget);
            v.extend(steps(r, budget));
            v
        }
        Par(l, r) => {
            let ls = steps(l, budget);
            let rs = steps(r, budget);
            let mut v = Vec::new();
            for (act, l2, c) in &ls {
                v.push((act.clone(), Par(Box::new(l2.clone()), r.clone()), *c));
            }
            for (act, r2, c) in &rs {
                v.push((act.clone(), Par(l.clone(), Box::new(r2.clone())), *c));
            }
            for (outs, ins, left_out) in [(&ls, &rs, true), (&rs, &ls, false)] {
                for (o, o2, oc) in outs {
                    let Act::Out(a, b, bound) = o else { continue };
                    for (i, i2, ic) in ins {
                        let Act::In(a2, x) = i else { continue };
                        if a != a2 || oc + ic > budget {
                            continue;
                        }
                        let received = rename(i2, x, b);
                        let target = if left_out {
                            Par(Box::new(o2.clone()), Box::new(received))
                        } else {
                            Par(Box::new(received), Box::new(o2.clone()))
                        };
                        let target = if *bound {
                            New(b.clone(), Box::new(target))
                        } else {
                            target
                        };
                        v.push((Act::Tau, target, oc + ic));
                    }
                }
            }
            v
        }
        New(a, k) => {
            let mut v = Vec::new();
            for (act, k2, c) in steps(k, budget) {
                match act {
                    Act::Out(ch, _, _) | Act::In(ch, _) if &ch == a => {}
                    Act::Out(ch, pl, false) if &pl == a => {
                        let fresh = Name::new(a.sort(), a.hint());
                        v.push((
                            Act::Out(ch, fresh.clone(), true),
                            rename(&k2, a, &fresh),
                            c,
                        ));
                    }
                    act => v.push((act, New(a.clone(), Box::new(k2)), c)),
                }
            }
            v
        }
        Rep(k) => {
            if budget == 0 {
                return vec![];
            }
            let unfolded = Par(k.clone(), Box::new(p.clone()));
            steps(&unfolded, budget - 1)
                .into_iter()
                .map(|(a, t, c)| (a, t, c + 1))
                .collect()
        }
        Match(..) => vec![],
    }
}

/// Renders a label sequence with names outside `free` replaced by their
/// order of first occurrence.
pub fn canonical(trace: &[Act], free: &BTreeSet<Name>) -> Vec<String> {
    let mut seen: BTreeMap<Name, usize> = BTreeMap::new();
    let mut show = |n: &Name| {
        if free.contains(n) {
            format!("{}#{}", n.hint(), n.id())
        } else {
            let k = seen.len();
            format!("_{}", seen.entry(n.clone()).or_insert(k))
        }
    };
    trace
        .iter()
        .map(|a| match a {
            Act::Out(c, p, bound) => {
                let c = show(c);
                let p = show(p);
                format!("out {c} {}{p}", if *bound { "new " } else { "" })
            }
            Act::In(c, x) => {
                let c = show(c);
                format!("in {c} {}", show(x))
            }
            Act::Tau => "tau".into(),
        })
        .collect()
}

fn prefixes_into(out: &mut BTreeSet<Vec<String>>, trace: &[Act], free: &BTreeSet<Name>) {
    for k in 0..=trace.len() {
        out.insert(canonical(&trace[..k], free));
    }
}

/// All label sequences up to `depth` of the direct reducer.
pub fn oracle_traces(p: &PiProcess, depth: usize, budget: usize) -> BTreeSet<Vec<String>> {
    fn go(
        p: &PiProcess,
        depth: usize,
        budget: usize,
        prefix: &mut Vec<Act>,
        free: &BTreeSet<Name>,
        out: &mut BTreeSet<Vec<String>>,
    ) {
        out.insert(canonical(prefix, free));
        if depth == 0 {
            return;
        }
        for (act, q, c) in steps(p, budget) {
            prefix.push(act);
            go(&q, depth - 1, budget - c, prefix, free, out);
            prefix.pop();
        }
    }
    let free = p.free_names();
    let mut out = BTreeSet::new();
    go(p, depth, budget, &mut Vec::new(), &free, &mut out);
    out
}

fn act_of(l: &Label) -> Act {
    let name = |t: &Term| t.as_name().expect("pi labels carry names").clone();
    match l {
        Label::Tau => Act::Tau,
        Label::Input { channel, payload } => Act::In(name(channel), name(payload)),
        Label::Output {
            channel,
            extruded,
            payload,
        } => {
            let p = name(payload);
            let bound = extruded.contains(&p);
            Act::Out(name(channel), p, bound)
        }
    }
}

/// All label sequences up to `depth` of the encoded process under the psi
/// semantics.
pub fn psi_traces(p: &PiProcess, depth: usize, budget: usize) -> BTreeSet<Vec<String>> {
    let free = p.free_names();
    let encoded = encode_pi(p).expect("match-free process");
    let inst = make_pi_instance(free.iter().cloned());
    let traces = explore(&encoded, &inst, &ExploreConfig::new(depth, budget))
        .expect("exploration succeeds");
    let mut out = BTreeSet::new();
    for t in traces {
        let acts: Vec<Act> = t.steps.iter().map(|s| act_of(&s.label)).collect();
        prefixes_into(&mut out, &acts, &free);
    }
    out
}
