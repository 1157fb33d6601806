//! Translation of a validated ceremony into an ANP process.
//!
//! Each configuration with events becomes one thread running its events in
//! declaration order. An event waits for its dependencies with a `done`
//! guard and leaves a trailing assertion recording itself and its
//! dependency pairs. Variables bound in one configuration and read in
//! another of the same tree travel over private share channels.

use std::collections::{BTreeMap, BTreeSet};

use crate::anp::{
    make_anp_instance, ActionRecord, AnpAssertion, AnpCondition, AnpInstance, AnpProcess,
    Polarity, RewriteRule,
};
use crate::ceremony::diag::{has_errors, Diagnostic};
use crate::ceremony::syntax::*;
use crate::ceremony::validate::validate;
use crate::nominal::{Name, Sort};
use crate::psi::{EventId, Process};
use crate::term::{ChannelTerm, ConfigPath, Term};

#[derive(Clone, Debug)]
pub struct CompiledCeremony {
    pub process: AnpProcess,
    pub instance: AnpInstance,
    /// Declaration order.
    pub events: Vec<EventId>,
    pub channel_kinds: BTreeMap<Name, String>,
    /// Restricted constants, declaration order.
    pub secrets: Vec<Name>,
}

impl CompiledCeremony {
    pub fn channel_kind(&self, ch: &ChannelTerm) -> Option<&str> {
        self.channel_kinds.get(&ch.channel).map(String::as_str)
    }
}

/// Fails with the validation errors when `spec` does not validate.
pub fn compile(spec: &CeremonySpec) -> Result<CompiledCeremony, Vec<Diagnostic>> {
    let diags = validate(spec);
    if has_errors(&diags) {
        return Err(diags.into_iter().filter(Diagnostic::is_error).collect());
    }
    Ok(Compiler::new(spec).run())
}

/// The instance for `spec`: its rewrite rules, its events and the equality
/// probes of its test events.
pub fn make_instance(spec: &CeremonySpec) -> AnpInstance {
    Compiler::new(spec).instance()
}

struct Share {
    channel: ChannelTerm,
    vars: Vec<Name>,
}

struct Compiler<'a> {
    spec: &'a CeremonySpec,
    identities: BTreeMap<&'a str, Name>,
    configs: BTreeMap<&'a str, Name>,
    channels: BTreeMap<&'a str, Name>,
    constants: BTreeMap<&'a str, Name>,
    /// (tree root, variable) -> binder name
    vars: BTreeMap<(String, String), Name>,
}

impl<'a> Compiler<'a> {
    fn new(spec: &'a CeremonySpec) -> Self {
        let named = |sort, names: Vec<&'a str>| -> BTreeMap<&'a str, Name> {
            names.into_iter().map(|n| (n, Name::new(sort, n))).collect()
        };
        let mut vars = BTreeMap::new();
        for e in &spec.events {
            let root = spec.root_of(&e.config);
            for v in e.action.binds() {
                vars.entry((root.clone(), v.to_string()))
                    .or_insert_with(|| Name::new(Sort::Variable, v));
            }
        }
        Compiler {
            spec,
            identities: named(
                Sort::Identity,
                spec.identities.iter().map(|d| d.name.as_str()).collect(),
            ),
            configs: named(
                Sort::Configuration,
                spec.configs.iter().map(|d| d.name.as_str()).collect(),
            ),
            channels: named(
                Sort::Channel,
                spec.channels.iter().map(|d| d.name.as_str()).collect(),
            ),
            constants: named(
                Sort::Message,
                spec.constants.iter().map(|d| d.name.as_str()).collect(),
            ),
            vars,
        }
    }

    fn path(&self, config: &str) -> ConfigPath {
        let controller = self
            .spec
            .config(config)
            .and_then(|c| c.controller.as_deref())
            .map(|i| self.identities[i].clone());
        ConfigPath {
            controller,
            path: self
                .spec
                .path_of(config)
                .iter()
                .map(|c| self.configs[c.as_str()].clone())
                .collect(),
        }
    }

    fn channel_term(&self, channel: &str) -> ChannelTerm {
        let decl = self.spec.channel(channel).expect("validated channel");
        ChannelTerm {
            at: self.path(&decl.endpoint),
            channel: self.channels[channel].clone(),
        }
    }

    fn term(&self, e: &Expr, root: &str) -> Term {
        match e {
            Expr::Ident(x) | Expr::Bind(x) => {
                if let Some(v) = self.vars.get(&(root.to_string(), x.clone())) {
                    Term::Name(v.clone())
                } else if let Some(c) = self.constants.get(x.as_str()) {
                    Term::Name(c.clone())
                } else {
                    Term::app(x, Vec::new())
                }
            }
            Expr::App(f, args) => Term::app(f, args.iter().map(|a| self.term(a, root)).collect()),
        }
    }

    fn rule_term(&self, e: &Expr, vars: &mut BTreeMap<String, Name>) -> Term {
        match e {
            Expr::Ident(x) | Expr::Bind(x) if self.spec.signature.arity(x).is_none() => Term::Name(
                vars.entry(x.clone())
                    .or_insert_with(|| Name::new(Sort::Variable, x))
                    .clone(),
            ),
            Expr::Ident(x) | Expr::Bind(x) => Term::app(x, Vec::new()),
            Expr::App(f, args) => {
                Term::app(f, args.iter().map(|a| self.rule_term(a, vars)).collect())
            }
        }
    }

    fn instance(&self) -> AnpInstance {
        let rules = self
            .spec
            .signature
            .rules
            .iter()
            .map(|r| {
                let mut vars = BTreeMap::new();
                let lhs = self.rule_term(&r.lhs, &mut vars);
                RewriteRule::new(lhs, self.rule_term(&r.rhs, &mut vars))
            })
            .collect();
        let events = self.spec.events.iter().map(|e| EventId::new(&e.id)).collect();
        let probes = self
            .spec
            .events
            .iter()
            .filter_map(|e| match &e.action {
                EventAction::Test { lhs, rhs } => {
                    let root = self.spec.root_of(&e.config);
                    Some(AnpCondition::TermEq(
                        self.term(lhs, &root),
                        self.term(rhs, &root),
                    ))
                }
                _ => None,
            })
            .collect();
        make_anp_instance(rules, events, probes)
    }

    /// Share channels keyed by producer event index (outputs) and by first
    /// consuming event index (inputs).
    fn shares(&self) -> (BTreeMap<usize, Vec<Share>>, BTreeMap<usize, Vec<Share>>) {
        let spec = self.spec;
        let mut binder: BTreeMap<(String, &str), usize> = BTreeMap::new();
        // (producer, consumer config) -> (first consumer, vars)
        let mut wanted: BTreeMap<(usize, &str), (usize, BTreeSet<&str>)> = BTreeMap::new();
        for (i, e) in spec.events.iter().enumerate() {
            let root = spec.root_of(&e.config);
            for x in e.action.reads().iter().flat_map(|r| r.idents()) {
                if let Some(&p) = binder.get(&(root.clone(), x)) {
                    if spec.events[p].config != e.config {
                        wanted
                            .entry((p, e.config.as_str()))
                            .or_insert_with(|| (i, BTreeSet::new()))
                            .1
                            .insert(x);
                    }
                }
            }
            for v in e.action.binds() {
                binder.entry((root.clone(), v)).or_insert(i);
            }
        }
        let mut outs: BTreeMap<usize, Vec<Share>> = BTreeMap::new();
        let mut ins: BTreeMap<usize, Vec<Share>> = BTreeMap::new();
        for ((p, _), (first, vars)) in wanted {
            let producer = &spec.events[p];
            let root = spec.root_of(&producer.config);
            let channel = ChannelTerm {
                at: self.path(&producer.config),
                channel: Name::new(Sort::Channel, "sh"),
            };
            let vars: Vec<Name> = vars
                .into_iter()
                .map(|v| self.vars[&(root.clone(), v.to_string())].clone())
                .collect();
            outs.entry(p).or_default().push(Share {
                channel: channel.clone(),
                vars: vars.clone(),
            });
            ins.entry(first).or_default().push(Share { channel, vars });
        }
        (outs, ins)
    }

    fn run(self) -> CompiledCeremony {
        let spec = self.spec;
        let (outs, ins) = self.shares();
        let mut threads = Vec::new();
        for c in &spec.configs {
            let mine: Vec<usize> = (0..spec.events.len())
                .filter(|&i| spec.events[i].config == c.name)
                .collect();
            if mine.is_empty() {
                continue;
            }
            let mut rest = Process::Nil;
            for &i in mine.iter().rev() {
                rest = self.event(i, outs.get(&i).map_or(&[][..], Vec::as_slice), rest);
                for s in ins.get(&i).into_iter().flatten().rev() {
                    rest = Process::input(
                        Term::Channel(s.channel.clone()),
                        s.vars.clone(),
                        tuple_of(&s.vars),
                        rest,
                    );
                }
            }
            threads.push(rest);
        }
        let share_names: Vec<Name> = outs
            .values()
            .flatten()
            .map(|s| s.channel.channel.clone())
            .collect();
        let secrets: Vec<Name> = spec
            .constants
            .iter()
            .map(|c| self.constants[c.name.as_str()].clone())
            .collect();
        let process = Process::restrict_all(
            secrets.iter().cloned(),
            Process::restrict_all(share_names, Process::par_all(threads)),
        );
        let channel_kinds = spec
            .channels
            .iter()
            .map(|c| (self.channels[c.name.as_str()].clone(), c.kind.clone()))
            .collect();
        CompiledCeremony {
            process,
            instance: self.instance(),
            events: spec.events.iter().map(|e| EventId::new(&e.id)).collect(),
            channel_kinds,
            secrets,
        }
    }

    fn event(&self, i: usize, shares: &[Share], rest: AnpProcess) -> AnpProcess {
        let e = &self.spec.events[i];
        let id = EventId::new(&e.id);
        let root = self.spec.root_of(&e.config);
        let loc = || ChannelTerm {
            at: self.path(&e.config),
            channel: Name::new(Sort::Channel, "loc"),
        };

        let (record_channel, polarity, payload) = match &e.action {
            EventAction::Send { channel, payload } => (
                self.channel_term(channel),
                Polarity::Output,
                self.term(payload, &root),
            ),
            EventAction::Recv { channel, pattern } => (
                self.channel_term(channel),
                Polarity::Input,
                self.term(pattern, &root),
            ),
            EventAction::Fresh { var } | EventAction::Compute { var, .. } => (
                loc(),
                Polarity::Input,
                Term::Name(self.vars[&(root.clone(), var.clone())].clone()),
            ),
            EventAction::Test { lhs, rhs } => (
                loc(),
                Polarity::Input,
                Term::tuple(vec![self.term(lhs, &root), self.term(rhs, &root)]),
            ),
        };
        let record = ActionRecord {
            event: id.clone(),
            polarity,
            channel: record_channel.clone(),
            payload: payload.clone(),
        };
        let trail = AnpAssertion::new(
            [record],
            e.deps.iter().map(|d| (EventId::new(d), id.clone())),
        )
        .expect("validated dependencies are acyclic");
        let mut parts = vec![Process::Assert(trail)];
        parts.extend(shares.iter().map(|s| {
            Process::output(
                Term::Channel(s.channel.clone()),
                tuple_of(&s.vars),
                Process::Nil,
            )
        }));
        if !matches!(rest, Process::Nil) {
            parts.push(rest);
        }
        let cont = Process::par_all(parts);

        let body = match &e.action {
            EventAction::Send { .. } => {
                Process::output(Term::Channel(record_channel), payload, cont)
            }
            EventAction::Recv { pattern, .. } => {
                let vars = pattern
                    .binders()
                    .into_iter()
                    .map(|v| self.vars[&(root.clone(), v.to_string())].clone())
                    .collect();
                Process::input(Term::Channel(record_channel), vars, payload, cont)
            }
            EventAction::Fresh { var } => {
                let v = self.vars[&(root.clone(), var.clone())].clone();
                let fr = Name::new(Sort::Message, "fr");
                let ch = Term::Channel(record_channel.clone());
                Process::restrict(
                    record_channel.channel.clone(),
                    Process::par(
                        Process::restrict(
                            fr.clone(),
                            Process::output(ch.clone(), Term::Name(fr), Process::Nil),
                        ),
                        Process::input(ch, vec![v.clone()], Term::Name(v), cont),
                    ),
                )
            }
            EventAction::Compute { var, value } => {
                let v = self.vars[&(root.clone(), var.clone())].clone();
                let ch = Term::Channel(record_channel.clone());
                Process::restrict(
                    record_channel.channel.clone(),
                    Process::par(
                        Process::output(ch.clone(), self.term(value, &root), Process::Nil),
                        Process::input(ch, vec![v.clone()], Term::Name(v), cont),
                    ),
                )
            }
            EventAction::Test { .. } => {
                let ch = Term::Channel(record_channel.clone());
                Process::restrict(
                    record_channel.channel.clone(),
                    Process::par(
                        Process::output(ch.clone(), payload.clone(), Process::Nil),
                        Process::input(ch, Vec::new(), payload, cont),
                    ),
                )
            }
        };

        let mut guard = Vec::new();
        if !e.deps.is_empty() {
            guard.push(AnpCondition::done(e.deps.iter().map(|d| EventId::new(d))));
        }
        if let EventAction::Test { lhs, rhs } = &e.action {
            guard.push(AnpCondition::TermEq(
                self.term(lhs, &root),
                self.term(rhs, &root),
            ));
        }
        if guard.is_empty() {
            body
        } else {
            Process::Case(vec![(AnpCondition::and(guard), body)])
        }
    }
}

fn tuple_of(vars: &[Name]) -> Term {
    Term::tuple(vars.iter().cloned().map(Term::Name).collect())
}
