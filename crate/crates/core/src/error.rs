use serde::Serialize;
use thiserror::Error;

/// Severity of a single validation finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Note,
    Violation,
}

/// One finding produced by a structural check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn violation(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Violation,
            code,
            message: message.into(),
        }
    }

    pub fn note(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Note,
            code,
            message: message.into(),
        }
    }

    pub fn is_violation(&self) -> bool {
        self.severity == Severity::Violation
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Returns only the violations, dropping notes.
pub fn violations(diagnostics: &[Diagnostic]) -> Vec<Diagnostic> {
    diagnostics
        .iter()
        .filter(|d| d.is_violation())
        .cloned()
        .collect()
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error at {location}: {message}")]
    Input { location: String, message: String },

    #[error("validation failed: {}", summarize(.0))]
    Validation(Vec<Diagnostic>),

    #[error("{what} did not converge: {detail}")]
    NonConvergence {
        what: String,
        detail: String,
        best_upper_bound: Option<usize>,
    },

    #[error("{what} exceeded the resource guard ({limit})")]
    Resource {
        what: String,
        limit: usize,
        partial: Vec<f64>,
    },
}

fn summarize(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn input(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Input {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input { .. } | Error::Validation(_) => 2,
            Error::NonConvergence { .. } => 3,
            Error::Resource { .. } => 4,
        }
    }

    /// Fails with `Error::Validation` when any violation is present.
    pub fn check(diagnostics: Vec<Diagnostic>) -> Result<()> {
        let bad = violations(&diagnostics);
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
