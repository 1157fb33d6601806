use std::fmt;

use crate::ceremony::syntax::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Stable diagnostic codes.
pub mod codes {
    pub const EMPTY: &str = "E000";
    pub const SYNTAX: &str = "E001";
    pub const ENCODING: &str = "E002";
    pub const DUPLICATE: &str = "V001";
    pub const UNKNOWN_IDENTITY: &str = "V002";
    pub const CONFIG_CYCLE: &str = "V003";
    pub const UNKNOWN_CONFIG: &str = "V004";
    pub const UNKNOWN_CHANNEL: &str = "V005";
    pub const DETACHED_CHANNEL: &str = "V006";
    pub const UNKNOWN_EVENT: &str = "V007";
    pub const DEPENDENCY_CYCLE: &str = "V008";
    pub const UNKNOWN_SYMBOL: &str = "V009";
    pub const ARITY: &str = "V010";
    pub const UNBOUND_VARIABLE: &str = "V011";
    pub const SECRET_SCOPE: &str = "V012";
    pub const REBINDING: &str = "V013";
    pub const UNKNOWN_PARENT: &str = "V014";
    pub const MISPLACED_BINDER: &str = "V015";
    pub const ORDER_CONFLICT: &str = "V016";
    pub const BAD_RULE: &str = "V017";
    pub const RUN_NOT_IMPLIED: &str = "W001";
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn error(span: Span, code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span,
            code,
            message: message.into(),
        }
    }

    pub fn warning(span: Span, code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            span,
            code,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: severity[code]: message`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{file}:{}:{}: {}[{}]: {}",
            self.span.line, self.span.col, self.severity, self.code, self.message
        )
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
