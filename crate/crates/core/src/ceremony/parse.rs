//! Line-oriented reader for `.anp` ceremony files.

use crate::ceremony::diag::{codes, Diagnostic};
use crate::ceremony::syntax::*;

const SECTIONS: [&str; 7] = [
    "identities",
    "configs",
    "channels",
    "signature",
    "constants",
    "events",
    "run",
];

pub(crate) const KEYWORDS: [&str; 10] = [
    "ceremony", "by", "in", "after", "send", "recv", "fresh", "compute", "test", "known",
];

const MAX_NESTING: usize = 128;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(usize),
    Sym(&'static str),
    KnownBy,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::KnownBy => "`known-by`".into(),
        }
    }
}

fn lex(line: &str, lineno: usize) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(lineno, i + 1);
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let boundary = chars
                .get(i + 3)
                .is_none_or(|c| !(c.is_ascii_alphanumeric() || *c == '_'));
            if word == "known" && rest == "-by" && boundary {
                i += 3;
                out.push((Tok::KnownBy, span));
            } else {
                out.push((Tok::Ident(word), span));
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse().map_err(|_| {
                Diagnostic::error(span, codes::SYNTAX, format!("number `{digits}` is too large"))
            })?;
            out.push((Tok::Num(n), span));
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let sym = match two.as_str() {
            "->" => Some("->"),
            ":=" => Some(":="),
            _ => None,
        };
        if let Some(s) = sym {
            out.push((Tok::Sym(s), span));
            i += 2;
            continue;
        }
        let sym = match c {
            ':' => ":",
            ',' => ",",
            '(' => "(",
            ')' => ")",
            '<' => "<",
            '=' => "=",
            '@' => "@",
            '?' => "?",
            '/' => "/",
            _ => {
                return Err(Diagnostic::error(
                    span,
                    codes::SYNTAX,
                    format!("unexpected character {c:?}"),
                ))
            }
        };
        out.push((Tok::Sym(sym), span));
        i += 1;
    }
    Ok(out)
}

struct Line {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    end: Span,
}

type PResult<T> = Result<T, Diagnostic>;

impl Line {
    fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        let found = self
            .peek()
            .map_or_else(|| "end of line".to_string(), Tok::describe);
        Err(Diagnostic::error(
            self.span(),
            codes::SYNTAX,
            format!("expected {wanted}, found {found}"),
        ))
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> PResult<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.unexpected(&format!("`{sym}`"))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(Tok::Ident(s)) => Err(Diagnostic::error(
                self.span(),
                codes::SYNTAX,
                format!("`{s}` is a keyword and cannot be used as {what}"),
            )),
            _ => self.unexpected(what),
        }
    }

    fn number(&mut self) -> PResult<usize> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.unexpected("a number"),
        }
    }

    fn finish(&self) -> PResult<()> {
        if self.pos < self.toks.len() {
            self.unexpected("end of line")
        } else {
            Ok(())
        }
    }

    fn ident_list(&mut self, what: &str) -> PResult<Vec<String>> {
        let mut out = vec![self.ident(what)?];
        while self.eat(",") {
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.expr_at(0)
    }

    fn expr_at(&mut self, depth: usize) -> PResult<Expr> {
        if depth > MAX_NESTING {
            return Err(Diagnostic::error(
                self.span(),
                codes::SYNTAX,
                "term nesting is too deep",
            ));
        }
        if self.eat("?") {
            return Ok(Expr::Bind(self.ident("a variable")?));
        }
        let head = self.ident("a term")?;
        if !self.eat("(") {
            return Ok(Expr::Ident(head));
        }
        let mut args = Vec::new();
        if !self.eat(")") {
            loop {
                args.push(self.expr_at(depth + 1)?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(Expr::App(head, args))
    }
}

fn section_header(toks: &[(Tok, Span)]) -> Option<&'static str> {
    match toks {
        [(Tok::Ident(s), _), (Tok::Sym(":"), _)] => SECTIONS.iter().copied().find(|k| k == s),
        _ => None,
    }
}

/// Parses a ceremony source. Reports every syntax error it can recover
/// from, one per line at most.
pub fn parse_ceremony(source: &str) -> Result<CeremonySpec, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut spec = CeremonySpec::default();
    let mut header_seen = false;
    let mut section: Option<&'static str> = None;
    let mut any_content = false;

    for (idx, raw) in source.lines().enumerate() {
        let lineno = idx + 1;
        let toks = match lex(raw, lineno) {
            Ok(t) => t,
            Err(d) => {
                any_content = true;
                diags.push(d);
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        any_content = true;
        let end = Span::new(lineno, raw.chars().count() + 1);
        let mut line = Line { toks, pos: 0, end };

        if !header_seen {
            header_seen = true;
            if line.eat_keyword("ceremony") {
                match line.ident("a ceremony name").and_then(|n| line.finish().map(|_| n)) {
                    Ok(n) => spec.name = n,
                    Err(d) => diags.push(d),
                }
                continue;
            }
            diags.push(Diagnostic::error(
                line.span(),
                codes::SYNTAX,
                "a ceremony file must start with `ceremony NAME`",
            ));
        }
        if let Some(s) = section_header(&line.toks) {
            section = Some(s);
            continue;
        }
        let Some(current) = section else {
            diags.push(Diagnostic::error(
                line.span(),
                codes::SYNTAX,
                "item outside of any section",
            ));
            continue;
        };
        let span = line.span();
        let item = match current {
            "identities" => parse_identity(&mut line, span, &mut spec),
            "configs" => parse_config(&mut line, span, &mut spec),
            "channels" => parse_channel(&mut line, span, &mut spec),
            "signature" => parse_signature_item(&mut line, span, &mut spec),
            "constants" => parse_constant(&mut line, span, &mut spec),
            "events" => parse_event(&mut line, span, &mut spec),
            _ => parse_run_pair(&mut line, span, &mut spec),
        };
        if let Err(d) = item.and_then(|_| line.finish()) {
            diags.push(d);
        }
    }

    if !any_content {
        return Err(vec![Diagnostic::error(
            Span::new(1, 1),
            codes::EMPTY,
            "empty specification",
        )]);
    }
    diags.extend(forest_cycles(&spec));
    if diags.is_empty() {
        Ok(spec)
    } else {
        Err(diags)
    }
}

/// Rejects input that is not UTF-8 before parsing.
pub fn parse_ceremony_bytes(bytes: &[u8]) -> Result<CeremonySpec, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse_ceremony(s),
        Err(e) => {
            let prefix = &bytes[..e.valid_up_to()];
            let line = prefix.iter().filter(|b| **b == b'\n').count() + 1;
            let col = prefix.iter().rev().take_while(|b| **b != b'\n').count() + 1;
            Err(vec![Diagnostic::error(
                Span::new(line, col),
                codes::ENCODING,
                "input is not valid UTF-8",
            )])
        }
    }
}

fn parse_identity(line: &mut Line, span: Span, spec: &mut CeremonySpec) -> PResult<()> {
    let name = line.ident("an identity name")?;
    spec.identities.push(Decl { name, span });
    Ok(())
}

fn parse_config(line: &mut Line, span: Span, spec: &mut CeremonySpec) -> PResult<()> {
    let name = line.ident("a configuration name")?;
    let parent = if line.eat_keyword("in") {
        Some(line.ident("a parent configuration")?)
    } else {
        None
    };
    let controller = if line.eat_keyword("by") {
        Some(line.ident("an identity")?)
    } else {
        None
    };
    spec.configs.push(ConfigDecl {
        name,
        parent,
        controller,
        span,
    });
    Ok(())
}

fn parse_channel(line: &mut Line, span: Span, spec: &mut CeremonySpec) -> PResult<()> {
    let name = line.ident("a channel name")?;
    line.expect(":")?;
    let kind = line.ident("a channel kind")?;
    let endpoint = line.ident("a configuration")?;
    line.expect("->")?;
    let peer = line.ident("a configuration")?;
    spec.channels.push(ChannelDecl {
        name,
        kind,
        endpoint,
        peer,
        span,
    });
    Ok(())
}

fn parse_signature_item(line: &mut Line, span: Span, spec: &mut CeremonySpec) -> PResult<()> {
    let is_ctor = matches!(line.toks.get(1), Some((Tok::Sym("/"), _)));
    if is_ctor {
        let name = line.ident("a constructor name")?;
        line.expect("/")?;
        let arity = line.number()?;
        spec.signature
            .constructors
            .push(CtorDecl { name, arity, span });
    } else {
        let lhs = line.expr()?;
        line.expect("->")?;
        let rhs = line.expr()?;
        spec.signature.rules.push(RuleDecl { lhs, rhs, span });
    }
    Ok(())
}

fn parse_constant(line: &mut Line, span: Span, spec: &mut CeremonySpec) -> PResult<()> {
    let name = line.ident("a constant name")?;
    let known_by = if matches!(line.peek(), Some(Tok::KnownBy)) {
        line.pos += 1;
        line.ident_list("a configuration")?
    } else {
        Vec::new()
    };
    spec.constants.push(ConstDecl {
        name,
        known_by,
        span,
    });
    Ok(())
}

fn parse_event(line: &mut Line, span: Span, spec: &mut CeremonySpec) -> PResult<()> {
    let id = line.ident("an event id")?;
    line.expect("@")?;
    let config = line.ident("a configuration")?;
    line.expect(":")?;
    let action = if line.eat_keyword("send") {
        let channel = line.ident("a channel")?;
        let payload = line.expr()?;
        EventAction::Send { channel, payload }
    } else if line.eat_keyword("recv") {
        let channel = line.ident("a channel")?;
        let pattern = line.expr()?;
        EventAction::Recv { channel, pattern }
    } else if line.eat_keyword("fresh") {
        EventAction::Fresh {
            var: line.ident("a variable")?,
        }
    } else if line.eat_keyword("compute") {
        let var = line.ident("a variable")?;
        line.expect(":=")?;
        let value = line.expr()?;
        EventAction::Compute { var, value }
    } else if line.eat_keyword("test") {
        let lhs = line.expr()?;
        line.expect("=")?;
        let rhs = line.expr()?;
        EventAction::Test { lhs, rhs }
    } else {
        return line.unexpected("`send`, `recv`, `fresh`, `compute` or `test`");
    };
    let deps = if line.eat_keyword("after") {
        line.ident_list("an event id")?
    } else {
        Vec::new()
    };
    spec.events.push(EventDecl {
        id,
        config,
        action,
        deps,
        span,
    });
    Ok(())
}

fn parse_run_pair(line: &mut Line, span: Span, spec: &mut CeremonySpec) -> PResult<()> {
    let before = line.ident("an event id")?;
    line.expect("<")?;
    let after = line.ident("an event id")?;
    spec.run.push(RunPair {
        before,
        after,
        span,
    });
    Ok(())
}

/// One diagnostic per configuration whose ancestor chain loops back to it.
pub(crate) fn forest_cycles(spec: &CeremonySpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for c in &spec.configs {
        let mut seen = vec![c.name.as_str()];
        let mut cur = c.parent.as_deref();
        while let Some(p) = cur {
            if p == c.name {
                out.push(Diagnostic::error(
                    c.span,
                    codes::CONFIG_CYCLE,
                    format!("configuration `{}` is its own ancestor", c.name),
                ));
                break;
            }
            if seen.contains(&p) {
                break;
            }
            seen.push(p);
            cur = spec.config(p).and_then(|d| d.parent.as_deref());
        }
    }
    out
}
