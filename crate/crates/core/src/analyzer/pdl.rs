//! Past-time queries over accumulated assertions.

use std::fmt;

use crate::anp::{ActionRecord, AnpAssertion};
use crate::psi::EventId;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PayloadPattern {
    Any,
    Exact(Term),
    /// Constructor with positional sub-patterns. A bare identifier is a
    /// 0-ary pattern and also matches a name with that hint.
    App(String, Vec<PayloadPattern>),
}

impl PayloadPattern {
    pub fn matches(&self, t: &Term) -> bool {
        match (self, t) {
            (PayloadPattern::Any, _) => true,
            (PayloadPattern::Exact(u), _) => u == t,
            (PayloadPattern::App(f, ps), Term::App(g, ts)) => {
                f.as_str() == &**g
                    && ps.len() == ts.len()
                    && ps.iter().zip(ts).all(|(p, t)| p.matches(t))
            }
            (PayloadPattern::App(f, ps), Term::Name(n)) => ps.is_empty() && n.hint() == f,
            _ => false,
        }
    }
}

impl fmt::Display for PayloadPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PayloadPattern::Any => f.write_str("_"),
            PayloadPattern::Exact(t) => write!(f, "{t}"),
            PayloadPattern::App(c, ps) if ps.is_empty() => f.write_str(c),
            PayloadPattern::App(c, ps) => {
                write!(f, "{c}(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordPattern {
    pub event: EventId,
    pub payload: PayloadPattern,
}

impl RecordPattern {
    pub fn event(id: &str) -> Self {
        RecordPattern {
            event: EventId::new(id),
            payload: PayloadPattern::Any,
        }
    }

    pub fn matches(&self, r: &ActionRecord) -> bool {
        r.event == self.event && self.payload.matches(&r.payload)
    }
}

impl fmt::Display for RecordPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.event)?;
        if self.payload != PayloadPattern::Any {
            write!(f, ": {}", self.payload)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PdlQuery {
    Happened(RecordPattern),
    Before(RecordPattern, RecordPattern),
}

impl fmt::Display for PdlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdlQuery::Happened(p) => write!(f, "happened({p})"),
            PdlQuery::Before(p, q) => write!(f, "before({p}, {q})"),
        }
    }
}

pub fn eval_pdl(a: &AnpAssertion, q: &PdlQuery) -> bool {
    match q {
        PdlQuery::Happened(p) => a.done().iter().any(|r| p.matches(r)),
        PdlQuery::Before(p, q) => a.done().iter().filter(|r| p.matches(r)).any(|x| {
            a.done()
                .iter()
                .filter(|r| q.matches(r))
                .any(|y| a.depends().contains(&(x.event.clone(), y.event.clone())))
        }),
    }
}

/// `happened(REC)` or `before(REC, REC)` where `REC` is an event id,
/// optionally followed by `: PATTERN`. Patterns are `_`, identifiers and
/// constructor applications.
pub fn parse_query(src: &str) -> Result<PdlQuery, String> {
    let mut p = QParser {
        chars: src.chars().collect(),
        pos: 0,
    };
    let head = p.ident().ok_or_else(|| p.error("`happened` or `before`"))?;
    p.expect('(')?;
    let q = match head.as_str() {
        "happened" => PdlQuery::Happened(p.record()?),
        "before" => {
            let a = p.record()?;
            p.expect(',')?;
            PdlQuery::Before(a, p.record()?)
        }
        other => return Err(format!("unknown query `{other}`")),
    };
    p.expect(')')?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("end of query"));
    }
    Ok(q)
}

struct QParser {
    chars: Vec<char>,
    pos: usize,
}

impl QParser {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, wanted: &str) -> String {
        format!("query: expected {wanted} at column {}", self.pos + 1)
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn record(&mut self) -> Result<RecordPattern, String> {
        let id = self.ident().ok_or_else(|| self.error("an event id"))?;
        let payload = if self.eat(':') {
            self.pattern(0)?
        } else {
            PayloadPattern::Any
        };
        Ok(RecordPattern {
            event: EventId::new(&id),
            payload,
        })
    }

    fn pattern(&mut self, depth: usize) -> Result<PayloadPattern, String> {
        if depth > 64 {
            return Err("query: pattern nesting is too deep".into());
        }
        let head = self.ident().ok_or_else(|| self.error("a pattern"))?;
        if head == "_" {
            return Ok(PayloadPattern::Any);
        }
        let mut args = Vec::new();
        if self.eat('(') && !self.eat(')') {
            loop {
                args.push(self.pattern(depth + 1)?);
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(PayloadPattern::App(head, args))
    }
}
