//! Law checks shared by the property tests and the acceptance run.

use anp_psi::anp::{AnpAssertion, AnpInstance, AnpProcess};
use anp_psi::psi::{assertion_equivalent, frame, Instance, Proc, Process};
use anp_psi::term::Term;

fn equiv<I: Instance>(inst: &I, exact: bool, x: &I::Assertion, y: &I::Assertion) -> bool {
    if exact {
        x == y
    } else {
        assertion_equivalent(inst, x, y)
    }
}

/// Channel equivalence symmetry and transitivity, composition laws and
/// compositionality, for one tuple of sample values. With `exact` the
/// composition laws must hold as equalities.
pub fn instance_laws<I: Instance>(
    inst: &I,
    exact: bool,
    a: &I::Assertion,
    b: &I::Assertion,
    c: &I::Assertion,
    [m, n, k]: [&Term; 3],
) -> Result<(), String> {
    let eq = |x: &Term, y: &Term| inst.entails(a, &inst.channel_eq(x, y));
    if eq(m, n) != eq(n, m) {
        return Err(format!("channel equality not symmetric on {m}, {n}"));
    }
    if eq(m, n) && eq(n, k) && !eq(m, k) {
        return Err(format!("channel equality not transitive on {m}, {n}, {k}"));
    }
    let comp = |x: &I::Assertion, y: &I::Assertion| {
        inst.compose(x, y)
            .map_err(|e| format!("composition failed: {e:?}"))
    };
    let ab = comp(a, b)?;
    if !equiv(inst, exact, &ab, &comp(b, a)?) {
        return Err(format!("composition not commutative on {a}, {b}"));
    }
    let left = comp(&ab, c)?;
    let right = comp(a, &comp(b, c)?)?;
    if !equiv(inst, exact, &left, &right) {
        return Err(format!("composition not associative on {a}, {b}, {c}"));
    }
    if !equiv(inst, exact, &comp(a, &inst.unit())?, a) || !equiv(inst, exact, &comp(&inst.unit(), a)?, a) {
        return Err(format!("unit is not neutral for {a}"));
    }
    if assertion_equivalent(inst, a, b)
        && !assertion_equivalent(inst, &comp(a, c)?, &comp(b, c)?)
    {
        return Err(format!("compositionality fails for {a} ~ {b} with {c}"));
    }
    Ok(())
}

/// Assertions visible at top level and the number of restrictions above
/// them, read off the syntax directly.
fn visible(p: &AnpProcess, out: &mut Vec<AnpAssertion>, binders: &mut usize) {
    match p {
        Process::Assert(a) => out.push(a.clone()),
        Process::Par(l, r) => {
            visible(l, out, binders);
            visible(r, out, binders);
        }
        Process::Restrict(_, body) => {
            *binders += 1;
            visible(body, out, binders);
        }
        _ => {}
    }
}

/// The frame of `p` is the composition of its unguarded assertions, under
/// one binder per unguarded restriction.
pub fn frame_law(inst: &AnpInstance, p: &AnpProcess) -> Result<(), String> {
    let mut parts = Vec::new();
    let mut binders = 0;
    visible(p, &mut parts, &mut binders);
    let expected = AnpAssertion::new(
        parts.iter().flat_map(|a| a.done().iter().cloned()),
        parts.iter().flat_map(|a| a.depends().iter().cloned()),
    )
    .map_err(|e| e.to_string())?;
    let f = frame(inst, p).map_err(|e| e.to_string())?;
    if f.assertion != expected {
        return Err(format!("frame {} differs from {expected} for\n{p}", f.assertion));
    }
    if f.binders.len() != binders {
        return Err(format!(
            "frame has {} binders, expected {binders} for\n{p}",
            f.binders.len()
        ));
    }
    Ok(())
}

/// Guarded assertions never reach the frame.
pub fn guarded_invisible<I: Instance>(inst: &I, guard: impl Fn(Proc<I>) -> Proc<I>, a: I::Assertion) -> Result<(), String> {
    let p = guard(Process::Assert(a));
    let f = frame(inst, &p).map_err(|e| e.to_string())?;
    if f.assertion != inst.unit() || !f.binders.is_empty() {
        return Err(format!("assertion visible through a guard in\n{p}"));
    }
    Ok(())
}
