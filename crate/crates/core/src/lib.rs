//! Psi-calculus engine for actor-network procedures.
//!
//! Ceremony descriptions are parsed and validated, compiled into
//! psi-calculus processes over the ANP instance, executed under the
//! labelled transition semantics, and the partially ordered runs left in
//! the accumulated assertions are checked and queried.

pub mod analyzer;
pub mod anp;
pub mod ceremony;
pub mod cli;
pub mod nominal;
pub mod pi;
pub mod psi;
pub mod term;
