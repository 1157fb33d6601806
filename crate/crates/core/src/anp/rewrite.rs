//! Ground term normalisation under user rewrite rules.

use std::collections::BTreeMap;

use crate::anp::AnpError;
use crate::nominal::Name;
use crate::term::Term;

/// Default bound on rewrite steps before a rule set is declared divergent.
pub const DEFAULT_STEP_CAP: usize = 10_000;

/// `lhs -> rhs`; variable-sorted names in `lhs` are rule variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Term,
    pub rhs: Term,
}

impl RewriteRule {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        RewriteRule { lhs, rhs }
    }

    /// Matches the left-hand side at the root of `t`.
    pub fn matches(&self, t: &Term) -> Option<BTreeMap<Name, Term>> {
        let mut bind = BTreeMap::new();
        match_rule(&self.lhs, t, &mut bind).then_some(bind)
    }

    pub fn instantiate(&self, bind: &BTreeMap<Name, Term>) -> Term {
        instantiate(&self.rhs, bind)
    }
}

fn match_rule(pattern: &Term, t: &Term, bind: &mut BTreeMap<Name, Term>) -> bool {
    match pattern {
        Term::Name(v) if v.is_variable() => match bind.get(v) {
            Some(prev) => prev == t,
            None => {
                bind.insert(v.clone(), t.clone());
                true
            }
        },
        Term::App(f, ps) => match t {
            Term::App(g, ts) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).all(|(p, t)| match_rule(p, t, bind))
            }
            _ => false,
        },
        _ => pattern == t,
    }
}

fn instantiate(t: &Term, bind: &BTreeMap<Name, Term>) -> Term {
    match t {
        Term::Name(v) => bind.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, args) => {
            Term::App(f.clone(), args.iter().map(|a| instantiate(a, bind)).collect())
        }
        Term::Channel(_) => t.clone(),
    }
}

/// Innermost normalisation. Fails once more than `cap` steps were taken.
pub fn normalize(t: &Term, rules: &[RewriteRule], cap: usize) -> Result<Term, AnpError> {
    let mut steps = 0;
    norm(t, rules, cap, &mut steps)
}

fn norm(t: &Term, rules: &[RewriteRule], cap: usize, steps: &mut usize) -> Result<Term, AnpError> {
    let mut current = match t {
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter()
                .map(|a| norm(a, rules, cap, steps))
                .collect::<Result<_, _>>()?,
        ),
        _ => t.clone(),
    };
    loop {
        let Some(next) = rules
            .iter()
            .find_map(|r| r.matches(&current).map(|b| r.instantiate(&b)))
        else {
            return Ok(current);
        };
        *steps += 1;
        if *steps > cap {
            return Err(AnpError::RewriteDivergence { cap });
        }
        // The contractum may expose new redexes below the root.
        current = match next {
            Term::App(f, args) => Term::App(
                f,
                args.iter()
                    .map(|a| norm(a, rules, cap, steps))
                    .collect::<Result<_, _>>()?,
            ),
            other => other,
        };
    }
}

/// Equality of message terms modulo the rewrite rules.
pub fn message_eq(
    m: &Term,
    n: &Term,
    rules: &[RewriteRule],
    cap: usize,
) -> Result<bool, AnpError> {
    if rules.is_empty() {
        return Ok(m == n);
    }
    Ok(normalize(m, rules, cap)? == normalize(n, rules, cap)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nominal::Sort;

    fn msg(h: &str) -> Term {
        Term::Name(Name::new(Sort::Message, h))
    }

    fn fst_rule() -> RewriteRule {
        let x = Term::Name(Name::new(Sort::Variable, "X"));
        let y = Term::Name(Name::new(Sort::Variable, "Y"));
        RewriteRule::new(Term::app("fst", vec![Term::app("pair", vec![x.clone(), y])]), x)
    }

    #[test]
    fn identical_terms_are_equal() {
        let s = msg("s");
        let x = msg("x");
        let h = Term::app("hash", vec![s, x]);
        assert!(message_eq(&h, &h.clone(), &[], DEFAULT_STEP_CAP).unwrap());
    }

    #[test]
    fn distinct_leaves_differ() {
        let s = msg("s");
        let h1 = Term::app("hash", vec![s.clone(), msg("x")]);
        let h2 = Term::app("hash", vec![s, msg("y")]);
        assert!(!message_eq(&h1, &h2, &[fst_rule()], DEFAULT_STEP_CAP).unwrap());
    }

    #[test]
    fn projection_rewrites() {
        let a = msg("a");
        let b = msg("b");
        let t = Term::app("fst", vec![Term::app("pair", vec![a.clone(), b])]);
        assert!(message_eq(&t, &a, &[fst_rule()], DEFAULT_STEP_CAP).unwrap());
        let nested = Term::app("hash", vec![t.clone(), Term::app("fst", vec![t])]);
        assert_eq!(
            normalize(&nested, &[fst_rule()], DEFAULT_STEP_CAP).unwrap(),
            Term::app("hash", vec![a.clone(), Term::app("fst", vec![a])])
        );
    }

    #[test]
    fn divergent_rules_hit_the_cap() {
        let x = Term::Name(Name::new(Sort::Variable, "X"));
        let loop_rule = RewriteRule::new(
            Term::app("f", vec![x.clone()]),
            Term::app("f", vec![Term::app("g", vec![x])]),
        );
        let t = Term::app("f", vec![msg("a")]);
        assert_eq!(
            message_eq(&t, &t, &[loop_rule], 50),
            Err(AnpError::RewriteDivergence { cap: 50 })
        );
    }
}
