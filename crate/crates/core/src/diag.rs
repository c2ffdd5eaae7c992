use std::fmt;

/// Non-fatal findings collected while walking a repository. The pipeline keeps
/// going on warnings; only unreadable roots and broken invariants abort a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Info,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// What the finding is about: a file path, a module, a service name.
    pub scope: String,
    pub message: String,
}

impl Diagnostic {
    pub fn warning(scope: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            scope: scope.into(),
            message: message.into(),
        }
    }

    pub fn info(scope: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Info,
            scope: scope.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Info => "info",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.scope, self.message)
    }
}
