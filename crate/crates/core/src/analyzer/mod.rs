//! Exploration of compiled processes and analysis of their runs.

pub mod explore;
pub mod pdl;
pub mod pomset;
pub mod report;

pub use explore::{explore, ExploreConfig, Trace, TraceStatus, TraceStep};
pub use pdl::{eval_pdl, parse_query, PayloadPattern, PdlQuery, RecordPattern};
pub use pomset::{check_desired_run, extract_pomset, pomset_of, PomsetError, PomsetRun, Verdict};
pub use report::{sorted_traces, TraceReport};

use crate::anp::{ActionRecord, AnpAssertion};
use crate::ceremony::CompiledCeremony;
use crate::psi::PsiError;
use crate::term::Term;

/// Closed-world exploration of a compiled ceremony: only internal steps,
/// complete once every declared event has happened.
pub fn explore_ceremony(
    c: &CompiledCeremony,
    depth_bound: usize,
    unfold_budget: usize,
) -> Result<Vec<Trace<AnpAssertion>>, PsiError> {
    let cfg = ExploreConfig::new(depth_bound, unfold_budget).closed(c.events.iter().cloned());
    explore(&c.process, &c.instance, &cfg)
}

/// Records on channels of `kind` whose whole payload is one of the
/// ceremony's secrets. Secrets are recognised by name hint, which survives
/// the renaming of binders during exploration.
pub fn bare_secret_payloads<'a>(
    c: &CompiledCeremony,
    a: &'a AnpAssertion,
    kind: &str,
) -> Vec<&'a ActionRecord> {
    a.done()
        .iter()
        .filter(|r| c.channel_kind(&r.channel) == Some(kind))
        .filter(|r| match &r.payload {
            Term::Name(n) => c.secrets.iter().any(|s| s.hint() == n.hint()),
            _ => false,
        })
        .collect()
}
