use std::collections::{BTreeMap, BTreeSet};

use crate::ceremony::diag::{codes, Diagnostic};
use crate::ceremony::parse::forest_cycles;
use crate::ceremony::syntax::*;

/// All well-formedness problems of `spec`, errors and warnings, in source
/// order within each check.
pub fn validate(spec: &CeremonySpec) -> Vec<Diagnostic> {
    let mut v = Validator {
        spec,
        out: Vec::new(),
    };
    v.duplicates();
    v.configs();
    v.channels();
    v.signature();
    v.constants();
    v.events();
    v.ordering();
    v.run();
    v.out
}

struct Validator<'a> {
    spec: &'a CeremonySpec,
    out: Vec<Diagnostic>,
}

fn dup_check<'a>(
    out: &mut Vec<Diagnostic>,
    what: &str,
    items: impl Iterator<Item = (&'a str, Span)>,
) {
    let mut seen = BTreeSet::new();
    for (name, span) in items {
        if !seen.insert(name) {
            out.push(Diagnostic::error(
                span,
                codes::DUPLICATE,
                format!("{what} `{name}` is declared twice"),
            ));
        }
    }
}

impl<'a> Validator<'a> {
    fn err(&mut self, span: Span, code: &'static str, msg: String) {
        self.out.push(Diagnostic::error(span, code, msg));
    }

    fn duplicates(&mut self) {
        let s = self.spec;
        dup_check(
            &mut self.out,
            "identity",
            s.identities.iter().map(|d| (d.name.as_str(), d.span)),
        );
        dup_check(
            &mut self.out,
            "configuration",
            s.configs.iter().map(|d| (d.name.as_str(), d.span)),
        );
        dup_check(
            &mut self.out,
            "channel",
            s.channels.iter().map(|d| (d.name.as_str(), d.span)),
        );
        // constants and constructors share the term namespace
        dup_check(
            &mut self.out,
            "term symbol",
            s.signature
                .constructors
                .iter()
                .map(|d| (d.name.as_str(), d.span))
                .chain(s.constants.iter().map(|d| (d.name.as_str(), d.span))),
        );
        dup_check(
            &mut self.out,
            "event",
            s.events.iter().map(|d| (d.id.as_str(), d.span)),
        );
    }

    fn config_exists(&mut self, name: &str, span: Span) -> bool {
        if self.spec.config(name).is_some() {
            return true;
        }
        self.err(
            span,
            codes::UNKNOWN_CONFIG,
            format!("unknown configuration `{name}`"),
        );
        false
    }

    fn configs(&mut self) {
        let s = self.spec;
        for c in &s.configs {
            if let Some(i) = &c.controller {
                if !s.identities.iter().any(|d| &d.name == i) {
                    self.err(
                        c.span,
                        codes::UNKNOWN_IDENTITY,
                        format!("unknown identity `{i}`"),
                    );
                }
            }
            if let Some(p) = &c.parent {
                if s.config(p).is_none() {
                    self.err(
                        c.span,
                        codes::UNKNOWN_PARENT,
                        format!("unknown parent configuration `{p}`"),
                    );
                }
            }
        }
        self.out.extend(forest_cycles(s));
    }

    fn channels(&mut self) {
        for c in &self.spec.channels {
            self.config_exists(&c.endpoint, c.span);
            self.config_exists(&c.peer, c.span);
        }
    }

    fn signature(&mut self) {
        let s = self.spec;
        for r in &s.signature.rules {
            let head_ok = matches!(&r.lhs, Expr::App(f, _) if s.signature.arity(f).is_some());
            if !head_ok {
                self.err(
                    r.span,
                    codes::BAD_RULE,
                    "rule left-hand side must be a constructor application".into(),
                );
            }
            let mut lhs_vars = BTreeSet::new();
            self.rule_expr(&r.lhs, r.span, &mut lhs_vars);
            let mut rhs_vars = BTreeSet::new();
            self.rule_expr(&r.rhs, r.span, &mut rhs_vars);
            for v in rhs_vars.difference(&lhs_vars) {
                self.err(
                    r.span,
                    codes::BAD_RULE,
                    format!("rule variable `{v}` does not occur on the left-hand side"),
                );
            }
        }
    }

    fn rule_expr(&mut self, e: &Expr, span: Span, vars: &mut BTreeSet<String>) {
        match e {
            Expr::Bind(v) => self.err(
                span,
                codes::MISPLACED_BINDER,
                format!("`?{v}` is only allowed in receive patterns"),
            ),
            Expr::Ident(x) => match self.spec.signature.arity(x) {
                Some(0) => {}
                Some(n) => self.err(
                    span,
                    codes::ARITY,
                    format!("constructor `{x}` expects {n} arguments, got 0"),
                ),
                None if self.spec.constant(x).is_some() => self.err(
                    span,
                    codes::BAD_RULE,
                    format!("constant `{x}` cannot occur in a rule"),
                ),
                None => {
                    vars.insert(x.clone());
                }
            },
            Expr::App(f, args) => {
                self.arity(f, args.len(), span);
                for a in args {
                    self.rule_expr(a, span, vars);
                }
            }
        }
    }

    fn arity(&mut self, f: &str, n: usize, span: Span) {
        match self.spec.signature.arity(f) {
            Some(k) if k == n => {}
            Some(k) => self.err(
                span,
                codes::ARITY,
                format!("constructor `{f}` expects {k} arguments, got {n}"),
            ),
            None => self.err(
                span,
                codes::UNKNOWN_SYMBOL,
                format!("unknown constructor `{f}`"),
            ),
        }
    }

    fn constants(&mut self) {
        for c in &self.spec.constants {
            for k in &c.known_by {
                self.config_exists(k, c.span);
            }
        }
    }

    fn events(&mut self) {
        let s = self.spec;
        let ids: BTreeSet<&str> = s.events.iter().map(|e| e.id.as_str()).collect();
        // per forest root: variable -> binding event
        let mut scopes: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let all_bound: BTreeSet<&str> = s.events.iter().flat_map(|e| e.action.binds()).collect();

        for e in &s.events {
            let config_ok = self.config_exists(&e.config, e.span);
            if let Some(ch) = e.action.channel() {
                match s.channel(ch) {
                    None => self.err(
                        e.span,
                        codes::UNKNOWN_CHANNEL,
                        format!("unknown channel `{ch}`"),
                    ),
                    Some(c) if config_ok && c.endpoint != e.config && c.peer != e.config => self
                        .err(
                            e.span,
                            codes::DETACHED_CHANNEL,
                            format!("channel `{ch}` is not attached to `{}`", e.config),
                        ),
                    _ => {}
                }
            }
            for d in &e.deps {
                if !ids.contains(d.as_str()) {
                    self.err(e.span, codes::UNKNOWN_EVENT, format!("unknown event `{d}`"));
                }
            }

            let root = s.root_of(&e.config);
            let scope = scopes.entry(root).or_default().clone();
            let reads = e.action.reads();
            for (i, ex) in reads.iter().enumerate() {
                let binders_ok = matches!(e.action, EventAction::Recv { .. }) && i == 0;
                self.event_expr(ex, e, &scope, &all_bound, binders_ok);
            }
            let mut local = BTreeSet::new();
            for v in e.action.binds() {
                if s.signature.arity(v).is_some() || s.constant(v).is_some() {
                    self.err(
                        e.span,
                        codes::REBINDING,
                        format!("variable `{v}` shadows a declared symbol"),
                    );
                } else if scope.contains_key(v) || !local.insert(v) {
                    self.err(
                        e.span,
                        codes::REBINDING,
                        format!("variable `{v}` is bound twice"),
                    );
                }
            }
            let scope = scopes.get_mut(&s.root_of(&e.config)).expect("scope entry");
            for v in local {
                scope.insert(v.to_string(), e.id.clone());
            }
        }
    }

    fn event_expr(
        &mut self,
        ex: &Expr,
        e: &EventDecl,
        scope: &BTreeMap<String, String>,
        all_bound: &BTreeSet<&str>,
        binders_ok: bool,
    ) {
        match ex {
            Expr::Bind(v) if !binders_ok => self.err(
                e.span,
                codes::MISPLACED_BINDER,
                format!("`?{v}` is only allowed in receive patterns"),
            ),
            Expr::Bind(_) => {}
            Expr::Ident(x) => {
                if scope.contains_key(x) {
                    return;
                }
                if let Some(c) = self.spec.constant(x) {
                    if !c.known_by.contains(&e.config) {
                        self.err(
                            e.span,
                            codes::SECRET_SCOPE,
                            format!("`{x}` is not known by `{}`", e.config),
                        );
                    }
                    return;
                }
                match self.spec.signature.arity(x) {
                    Some(0) => {}
                    Some(_) => self.arity(x, 0, e.span),
                    None if all_bound.contains(x.as_str()) => self.err(
                        e.span,
                        codes::UNBOUND_VARIABLE,
                        format!(
                            "variable `{x}` is not bound by an earlier event in the same configuration tree"
                        ),
                    ),
                    None => self.err(
                        e.span,
                        codes::UNKNOWN_SYMBOL,
                        format!("unknown identifier `{x}`"),
                    ),
                }
            }
            Expr::App(f, args) => {
                self.arity(f, args.len(), e.span);
                for a in args {
                    self.event_expr(a, e, scope, all_bound, binders_ok);
                }
            }
        }
    }

    /// Dependency cycles first. Cycles that only appear once declaration
    /// order inside a configuration and variable sharing are added come
    /// second.
    fn ordering(&mut self) {
        let s = self.spec;
        let index: BTreeMap<&str, usize> = s
            .events
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.as_str(), i))
            .collect();
        let n = s.events.len();
        let mut deps: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in s.events.iter().enumerate() {
            for d in &e.deps {
                if let Some(&j) = index.get(d.as_str()) {
                    deps[j].push(i);
                }
            }
        }
        let cycles = cyclic_components(&deps);
        for comp in &cycles {
            let first = comp.iter().copied().min().expect("nonempty component");
            let names: Vec<&str> = comp.iter().map(|&i| s.events[i].id.as_str()).collect();
            self.err(
                s.events[first].span,
                codes::DEPENDENCY_CYCLE,
                format!("dependency cycle through {}", names.join(", ")),
            );
        }
        if !cycles.is_empty() {
            return;
        }
        let mut with_order = deps;
        let mut last: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, e) in s.events.iter().enumerate() {
            if let Some(j) = last.insert(e.config.as_str(), i) {
                with_order[j].push(i);
            }
        }
        let mut binder: BTreeMap<(String, &str), usize> = BTreeMap::new();
        for (i, e) in s.events.iter().enumerate() {
            let root = s.root_of(&e.config);
            for x in e.action.reads().iter().flat_map(|r| r.idents()) {
                if let Some(&j) = binder.get(&(root.clone(), x)) {
                    with_order[j].push(i);
                }
            }
            for v in e.action.binds() {
                binder.entry((root.clone(), v)).or_insert(i);
            }
        }
        for comp in cyclic_components(&with_order) {
            let first = comp.iter().copied().min().expect("nonempty component");
            let names: Vec<&str> = comp.iter().map(|&i| s.events[i].id.as_str()).collect();
            self.err(
                s.events[first].span,
                codes::ORDER_CONFLICT,
                format!(
                    "dependencies contradict the declaration order of events {}",
                    names.join(", ")
                ),
            );
        }
    }

    fn run(&mut self) {
        let s = self.spec;
        let mut edges: BTreeSet<(&str, &str)> = BTreeSet::new();
        for e in &s.events {
            for d in &e.deps {
                edges.insert((d.as_str(), e.id.as_str()));
            }
        }
        let implied = closure(&edges);
        for p in &s.run {
            let mut known = true;
            for id in [&p.before, &p.after] {
                if s.event(id).is_none() {
                    known = false;
                    self.err(p.span, codes::UNKNOWN_EVENT, format!("unknown event `{id}`"));
                }
            }
            if known && !implied.contains(&(p.before.as_str(), p.after.as_str())) {
                self.out.push(Diagnostic::warning(
                    p.span,
                    codes::RUN_NOT_IMPLIED,
                    format!(
                        "`{} < {}` is not implied by the declared dependencies",
                        p.before, p.after
                    ),
                ));
            }
        }
    }
}

fn closure<'a>(edges: &BTreeSet<(&'a str, &'a str)>) -> BTreeSet<(&'a str, &'a str)> {
    let mut out = edges.clone();
    loop {
        let extra: Vec<_> = out
            .iter()
            .flat_map(|&(a, b)| {
                out.iter()
                    .filter(move |&&(c, _)| c == b)
                    .map(move |&(_, d)| (a, d))
            })
            .filter(|p| !out.contains(p))
            .collect();
        if extra.is_empty() {
            return out;
        }
        out.extend(extra);
    }
}

/// Strongly connected components that contain a cycle, each sorted, in
/// order of their smallest member. Tarjan's algorithm.
fn cyclic_components(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct St<'g> {
        succ: &'g [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        comps: Vec<Vec<usize>>,
    }
    fn visit(st: &mut St<'_>, v: usize) {
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in &st.succ[v] {
            match st.index[w] {
                None => {
                    visit(st, w);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                _ => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("tarjan stack");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            if comp.len() > 1 || st.succ[v].contains(&v) {
                comp.sort_unstable();
                st.comps.push(comp);
            }
        }
    }
    let n = succ.len();
    let mut st = St {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.index[v].is_none() {
            visit(&mut st, v);
        }
    }
    st.comps.sort();
    st.comps
}
