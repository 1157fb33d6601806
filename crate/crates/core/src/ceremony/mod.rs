//! Ceremony descriptions: syntax, validation and compilation.

pub mod compile;
pub mod diag;
pub mod parse;
pub mod print;
pub mod syntax;
pub mod validate;

pub use compile::{compile, make_instance, CompiledCeremony};
pub use diag::{has_errors, Diagnostic, Severity};
pub use parse::{parse_ceremony, parse_ceremony_bytes};
pub use print::pretty_print;
pub use syntax::CeremonySpec;
pub use validate::validate;
