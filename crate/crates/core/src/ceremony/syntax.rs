//! Surface syntax of ceremony descriptions.

use std::fmt;

/// Source position. Positions never take part in equality, so a spec and
/// its re-parsed pretty print compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigDecl {
    pub name: String,
    pub parent: Option<String>,
    pub controller: Option<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelDecl {
    pub name: String,
    /// Free-form kind tag such as `cyb`, `vis` or `kyb`.
    pub kind: String,
    pub endpoint: String,
    pub peer: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorDecl {
    pub name: String,
    pub arity: usize,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleDecl {
    pub lhs: Expr,
    pub rhs: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub constructors: Vec<CtorDecl>,
    pub rules: Vec<RuleDecl>,
}

impl Signature {
    pub fn arity(&self, ctor: &str) -> Option<usize> {
        self.constructors
            .iter()
            .find(|c| c.name == ctor)
            .map(|c| c.arity)
    }
}

/// A shared secret or password and the configurations that initially know
/// it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstDecl {
    pub name: String,
    pub known_by: Vec<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Ident(String),
    /// `?x` in a receive pattern: binds `x`.
    Bind(String),
    App(String, Vec<Expr>),
}

impl Expr {
    pub fn binders(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.binders_into(&mut out);
        out
    }

    fn binders_into<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Ident(_) => {}
            Expr::Bind(v) => out.push(v),
            Expr::App(_, args) => args.iter().for_each(|a| a.binders_into(out)),
        }
    }

    pub fn idents(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.idents_into(&mut out);
        out
    }

    fn idents_into<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Ident(v) => out.push(v),
            Expr::Bind(_) => {}
            Expr::App(_, args) => args.iter().for_each(|a| a.idents_into(out)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ident(v) => f.write_str(v),
            Expr::Bind(v) => write!(f, "?{v}"),
            Expr::App(c, args) => {
                write!(f, "{c}(")?;
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

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventAction {
    Send { channel: String, payload: Expr },
    Recv { channel: String, pattern: Expr },
    Fresh { var: String },
    Compute { var: String, value: Expr },
    Test { lhs: Expr, rhs: Expr },
}

impl EventAction {
    pub fn channel(&self) -> Option<&str> {
        match self {
            EventAction::Send { channel, .. } | EventAction::Recv { channel, .. } => Some(channel),
            _ => None,
        }
    }

    /// Variables introduced by the action.
    pub fn binds(&self) -> Vec<&str> {
        match self {
            EventAction::Recv { pattern, .. } => pattern.binders(),
            EventAction::Fresh { var } | EventAction::Compute { var, .. } => vec![var.as_str()],
            _ => Vec::new(),
        }
    }

    /// Expressions read by the action.
    pub fn reads(&self) -> Vec<&Expr> {
        match self {
            EventAction::Send { payload, .. } => vec![payload],
            EventAction::Recv { pattern, .. } => vec![pattern],
            EventAction::Fresh { .. } => vec![],
            EventAction::Compute { value, .. } => vec![value],
            EventAction::Test { lhs, rhs } => vec![lhs, rhs],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventDecl {
    pub id: String,
    pub config: String,
    pub action: EventAction,
    pub deps: Vec<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunPair {
    pub before: String,
    pub after: String,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CeremonySpec {
    pub name: String,
    pub identities: Vec<Decl>,
    pub configs: Vec<ConfigDecl>,
    pub channels: Vec<ChannelDecl>,
    pub signature: Signature,
    pub constants: Vec<ConstDecl>,
    pub events: Vec<EventDecl>,
    pub run: Vec<RunPair>,
}

impl CeremonySpec {
    pub fn config(&self, name: &str) -> Option<&ConfigDecl> {
        self.configs.iter().find(|c| c.name == name)
    }

    pub fn channel(&self, name: &str) -> Option<&ChannelDecl> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<&ConstDecl> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn event(&self, id: &str) -> Option<&EventDecl> {
        self.events.iter().find(|e| e.id == id)
    }

    /// Ancestor-first path from the root of the containment forest. Stops
    /// early on a cycle.
    pub fn path_of(&self, config: &str) -> Vec<String> {
        let mut path = vec![config.to_string()];
        let mut cur = self.config(config).and_then(|c| c.parent.clone());
        while let Some(p) = cur {
            if path.contains(&p) {
                break;
            }
            cur = self.config(&p).and_then(|c| c.parent.clone());
            path.push(p);
        }
        path.reverse();
        path
    }

    pub fn root_of(&self, config: &str) -> String {
        self.path_of(config).remove(0)
    }
}
