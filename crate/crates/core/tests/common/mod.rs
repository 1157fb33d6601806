#![allow(dead_code)]

pub mod laws;
pub mod pi_oracle;

use std::path::PathBuf;

use anp_psi::anp::{ActionRecord, AnpAssertion, AnpCondition, AnpProcess, Polarity};
use anp_psi::ceremony::syntax::*;
use anp_psi::nominal::{Name, Sort};
use anp_psi::pi::PiProcess;
use anp_psi::psi::{EventId, Process};
use anp_psi::term::{ChannelTerm, ConfigPath, Term};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture readable")
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
        .join(name)
}

fn sp() -> Span {
    Span::default()
}

fn ident(s: impl Into<String>) -> Expr {
    Expr::Ident(s.into())
}

fn random_term(rng: &mut StdRng, atoms: &[String], depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.5) {
        return ident(atoms.choose(rng).expect("nonempty atoms").clone());
    }
    match rng.gen_range(0..3) {
        0 => Expr::App(
            "hash".into(),
            vec![
                random_term(rng, atoms, depth - 1),
                random_term(rng, atoms, depth - 1),
            ],
        ),
        1 => Expr::App(
            "pair".into(),
            vec![
                random_term(rng, atoms, depth - 1),
                random_term(rng, atoms, depth - 1),
            ],
        ),
        _ => Expr::App("fst".into(), vec![random_term(rng, atoms, depth - 1)]),
    }
}

/// A valid ceremony with an acyclic dependency relation whose edges all
/// point from earlier to later declarations.
pub fn random_spec(rng: &mut StdRng, max_events: usize) -> CeremonySpec {
    let n_configs = rng.gen_range(2..=4);
    let identities = ["I0".to_string(), "I1".to_string()];
    let mut configs = Vec::new();
    for i in 0..n_configs {
        let parent = (i > 0 && rng.gen_bool(0.3)).then(|| format!("K{}", rng.gen_range(0..i)));
        let controller = rng
            .gen_bool(0.7)
            .then(|| identities.choose(rng).unwrap().clone());
        configs.push(ConfigDecl {
            name: format!("K{i}"),
            parent,
            controller,
            span: sp(),
        });
    }
    let mut channels = Vec::new();
    for i in 0..n_configs {
        for j in 0..n_configs {
            if i != j && (rng.gen_bool(0.35) || (i == 0 && j == 1)) {
                channels.push(ChannelDecl {
                    name: format!("ch{}", channels.len()),
                    kind: ["cyb", "vis", "kyb"].choose(rng).unwrap().to_string(),
                    endpoint: format!("K{i}"),
                    peer: format!("K{j}"),
                    span: sp(),
                });
            }
        }
    }
    let signature = Signature {
        constructors: [("hash", 2), ("pair", 2), ("fst", 1), ("nil", 0)]
            .iter()
            .map(|(n, a)| CtorDecl {
                name: n.to_string(),
                arity: *a,
                span: sp(),
            })
            .collect(),
        rules: if rng.gen_bool(0.5) {
            vec![RuleDecl {
                lhs: Expr::App(
                    "fst".into(),
                    vec![Expr::App("pair".into(), vec![ident("X"), ident("Y")])],
                ),
                rhs: ident("X"),
                span: sp(),
            }]
        } else {
            Vec::new()
        },
    };
    let mut known: Vec<String> = configs
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .map(|c| c.name.clone())
        .collect();
    if known.is_empty() {
        known.push("K0".into());
    }
    let constants = vec![ConstDecl {
        name: "s0".into(),
        known_by: known,
        span: sp(),
    }];

    let mut spec = CeremonySpec {
        name: format!("r{}", rng.gen_range(0..1000)),
        identities: identities
            .iter()
            .map(|n| Decl {
                name: n.clone(),
                span: sp(),
            })
            .collect(),
        configs,
        channels,
        signature,
        constants,
        events: Vec::new(),
        run: Vec::new(),
    };

    let n_events = rng.gen_range(1..=max_events);
    let mut bound: Vec<(String, String)> = Vec::new(); // (root, var)
    for i in 0..n_events {
        let config = format!("K{}", rng.gen_range(0..n_configs));
        let root = spec.root_of(&config);
        let mut atoms: Vec<String> = bound
            .iter()
            .filter(|(r, _)| *r == root)
            .map(|(_, v)| v.clone())
            .collect();
        if spec.constants[0].known_by.contains(&config) {
            atoms.push("s0".into());
        }
        atoms.push("nil".into());
        let attached: Vec<String> = spec
            .channels
            .iter()
            .filter(|c| c.endpoint == config || c.peer == config)
            .map(|c| c.name.clone())
            .collect();
        let var = format!("v{i}");
        let action = match rng.gen_range(0..5) {
            0 => EventAction::Fresh { var },
            1 => EventAction::Compute {
                var,
                value: random_term(rng, &atoms, 2),
            },
            2 => {
                let lhs = random_term(rng, &atoms, 1);
                let rhs = if rng.gen_bool(0.7) {
                    lhs.clone()
                } else {
                    random_term(rng, &atoms, 1)
                };
                EventAction::Test { lhs, rhs }
            }
            3 if !attached.is_empty() => EventAction::Send {
                channel: attached.choose(rng).unwrap().clone(),
                payload: random_term(rng, &atoms, 2),
            },
            4 if !attached.is_empty() => EventAction::Recv {
                channel: attached.choose(rng).unwrap().clone(),
                pattern: if rng.gen_bool(0.7) {
                    Expr::Bind(var)
                } else {
                    Expr::App(
                        "pair".into(),
                        vec![Expr::Bind(format!("{var}a")), Expr::Bind(format!("{var}b"))],
                    )
                },
            },
            _ => EventAction::Fresh { var },
        };
        for v in action.binds() {
            bound.push((root.clone(), v.to_string()));
        }
        let deps: Vec<String> = (0..i)
            .filter(|_| rng.gen_bool(0.3))
            .map(|j| format!("e{j}"))
            .collect();
        spec.events.push(EventDecl {
            id: format!("e{i}"),
            config,
            action,
            deps,
            span: sp(),
        });
    }
    let mut run = Vec::new();
    for e in &spec.events {
        for d in &e.deps {
            if rng.gen_bool(0.5) {
                run.push(RunPair {
                    before: d.clone(),
                    after: e.id.clone(),
                    span: sp(),
                });
            }
        }
    }
    spec.run = run;
    spec
}

/// Pools of names and records shared by the random assertion and process
/// generators, so that generated values overlap.
pub struct AnpPool {
    pub channels: Vec<ChannelTerm>,
    pub records: Vec<ActionRecord>,
    pub messages: Vec<Term>,
}

impl AnpPool {
    pub fn new() -> Self {
        let c = Name::new(Sort::Configuration, "C");
        let d = Name::new(Sort::Configuration, "D");
        let a = Name::new(Sort::Identity, "A");
        let chans: Vec<ChannelTerm> = [
            (Some(a.clone()), vec![c.clone()], "cyb"),
            (Some(a.clone()), vec![c.clone(), d.clone()], "kyb"),
            (None, vec![d.clone()], "vis"),
            (None, vec![d], "cyb"),
        ]
        .into_iter()
        .map(|(controller, path, ch)| ChannelTerm {
            at: ConfigPath { controller, path },
            channel: Name::new(Sort::Channel, ch),
        })
        .collect();
        let s = Term::Name(Name::new(Sort::Message, "s"));
        let x = Term::Name(Name::new(Sort::Message, "x"));
        let messages = vec![
            s.clone(),
            x.clone(),
            Term::app("hash", vec![s.clone(), x.clone()]),
            Term::app("pair", vec![x, s]),
        ];
        let records = (0..6)
            .map(|i| ActionRecord {
                event: EventId::new(&format!("a{i}")),
                polarity: if i % 2 == 0 {
                    Polarity::Output
                } else {
                    Polarity::Input
                },
                channel: chans[i % chans.len()].clone(),
                payload: messages[i % messages.len()].clone(),
            })
            .collect();
        AnpPool {
            channels: chans,
            records,
            messages,
        }
    }

    /// Dependency pairs only go from lower to higher record index, so any
    /// composition of generated assertions stays acyclic.
    pub fn assertion(&self, rng: &mut StdRng) -> AnpAssertion {
        let n = self.records.len();
        let done: Vec<ActionRecord> = self
            .records
            .iter()
            .filter(|_| rng.gen_bool(0.4))
            .cloned()
            .collect();
        let mut deps = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(0.15) {
                    deps.push((self.records[i].event.clone(), self.records[j].event.clone()));
                }
            }
        }
        AnpAssertion::new(done, deps).expect("forward pairs are acyclic")
    }

    pub fn condition(&self, rng: &mut StdRng) -> AnpCondition {
        match rng.gen_range(0..3) {
            0 => AnpCondition::TermEq(
                self.messages.choose(rng).unwrap().clone(),
                self.messages.choose(rng).unwrap().clone(),
            ),
            1 => AnpCondition::done(
                self.records
                    .iter()
                    .filter(|_| rng.gen_bool(0.3))
                    .map(|r| r.event.clone()),
            ),
            _ => AnpCondition::TermEq(
                Term::Channel(self.channels.choose(rng).unwrap().clone()),
                Term::Channel(self.channels.choose(rng).unwrap().clone()),
            ),
        }
    }

    /// Random process mixing visible and guarded assertions.
    pub fn process(&self, rng: &mut StdRng, depth: usize) -> AnpProcess {
        let leaf = depth == 0 || rng.gen_bool(0.25);
        if leaf {
            return if rng.gen_bool(0.6) {
                Process::Assert(self.assertion(rng))
            } else {
                Process::Nil
            };
        }
        let ch = Term::Channel(self.channels.choose(rng).unwrap().clone());
        match rng.gen_range(0..6) {
            0 | 1 => Process::par(self.process(rng, depth - 1), self.process(rng, depth - 1)),
            2 => Process::restrict(
                Name::new(Sort::Message, "n"),
                self.process(rng, depth - 1),
            ),
            3 => Process::output(
                ch,
                self.messages.choose(rng).unwrap().clone(),
                self.process(rng, depth - 1),
            ),
            4 => Process::Case(vec![(self.condition(rng), self.process(rng, depth - 1))]),
            _ => Process::replicate(self.process(rng, depth - 1)),
        }
    }
}

impl Default for AnpPool {
    fn default() -> Self {
        Self::new()
    }
}

/// Small monadic pi processes over the free names `free`.
pub fn random_pi(rng: &mut StdRng, free: &[Name], depth: usize) -> PiProcess {
    random_pi_in(rng, free.to_vec(), depth, true)
}

fn random_pi_in(rng: &mut StdRng, scope: Vec<Name>, depth: usize, allow_rep: bool) -> PiProcess {
    if depth == 0 || rng.gen_bool(0.15) {
        return PiProcess::Nil;
    }
    let pick = |rng: &mut StdRng| scope.choose(rng).unwrap().clone();
    match rng.gen_range(0..7) {
        0 | 1 => PiProcess::Out(
            pick(rng),
            pick(rng),
            Box::new(random_pi_in(rng, scope.clone(), depth - 1, allow_rep)),
        ),
        2 | 3 => {
            let x = Name::new(Sort::Channel, "x");
            let mut inner = scope.clone();
            inner.push(x.clone());
            PiProcess::In(
                pick(rng),
                x,
                Box::new(random_pi_in(rng, inner, depth - 1, allow_rep)),
            )
        }
        4 => PiProcess::Par(
            Box::new(random_pi_in(rng, scope.clone(), depth - 1, allow_rep)),
            Box::new(random_pi_in(rng, scope, depth - 1, allow_rep)),
        ),
        5 => {
            let n = Name::new(Sort::Channel, "n");
            let mut inner = scope.clone();
            inner.push(n.clone());
            PiProcess::New(n, Box::new(random_pi_in(rng, inner, depth - 1, allow_rep)))
        }
        _ if allow_rep && rng.gen_bool(0.5) => {
            PiProcess::Rep(Box::new(random_pi_in(rng, scope, depth - 1, false)))
        }
        _ => PiProcess::Sum(
            Box::new(random_pi_in(rng, scope.clone(), depth - 1, allow_rep)),
            Box::new(random_pi_in(rng, scope, depth - 1, allow_rep)),
        ),
    }
}
