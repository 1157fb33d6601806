use std::fmt::Write;

use crate::ceremony::syntax::*;

/// Canonical source text. Empty sections are left out.
pub fn pretty_print(spec: &CeremonySpec) -> String {
    let mut sections: Vec<(&str, Vec<String>)> = Vec::new();
    sections.push((
        "identities",
        spec.identities.iter().map(|d| d.name.clone()).collect(),
    ));
    sections.push(("configs", spec.configs.iter().map(config_line).collect()));
    sections.push((
        "channels",
        spec.channels
            .iter()
            .map(|c| format!("{}: {} {} -> {}", c.name, c.kind, c.endpoint, c.peer))
            .collect(),
    ));
    let mut sig: Vec<String> = spec
        .signature
        .constructors
        .iter()
        .map(|c| format!("{}/{}", c.name, c.arity))
        .collect();
    sig.extend(
        spec.signature
            .rules
            .iter()
            .map(|r| format!("{} -> {}", r.lhs, r.rhs)),
    );
    sections.push(("signature", sig));
    sections.push((
        "constants",
        spec.constants
            .iter()
            .map(|c| {
                if c.known_by.is_empty() {
                    c.name.clone()
                } else {
                    format!("{} known-by {}", c.name, c.known_by.join(", "))
                }
            })
            .collect(),
    ));
    sections.push(("events", spec.events.iter().map(event_line).collect()));
    sections.push((
        "run",
        spec.run
            .iter()
            .map(|p| format!("{} < {}", p.before, p.after))
            .collect(),
    ));

    let mut out = format!("ceremony {}\n", spec.name);
    let mut first = true;
    for (title, lines) in sections.into_iter().filter(|(_, l)| !l.is_empty()) {
        if !first {
            out.push('\n');
        }
        first = false;
        let _ = writeln!(out, "{title}:");
        for l in lines {
            let _ = writeln!(out, "  {l}");
        }
    }
    out
}

fn config_line(c: &ConfigDecl) -> String {
    let mut s = c.name.clone();
    if let Some(p) = &c.parent {
        let _ = write!(s, " in {p}");
    }
    if let Some(i) = &c.controller {
        let _ = write!(s, " by {i}");
    }
    s
}

fn event_line(e: &EventDecl) -> String {
    let action = match &e.action {
        EventAction::Send { channel, payload } => format!("send {channel} {payload}"),
        EventAction::Recv { channel, pattern } => format!("recv {channel} {pattern}"),
        EventAction::Fresh { var } => format!("fresh {var}"),
        EventAction::Compute { var, value } => format!("compute {var} := {value}"),
        EventAction::Test { lhs, rhs } => format!("test {lhs} = {rhs}"),
    };
    let mut s = format!("{} @ {}: {action}", e.id, e.config);
    if !e.deps.is_empty() {
        let _ = write!(s, " after {}", e.deps.join(", "));
    }
    s
}
