use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Stable diagnostic codes.
pub mod codes {
    pub const UNKNOWN_PROP: &str = "EO-UNKNOWN-PROP";
    pub const UNKNOWN_CONCEPT: &str = "EO-UNKNOWN-CONCEPT";
    pub const UNKNOWN_MODEL: &str = "EO-UNKNOWN-MODEL";
    pub const UNKNOWN_INDIVIDUAL: &str = "EO-UNKNOWN-INDIVIDUAL";
    pub const DUPLICATE: &str = "EO-DUPLICATE";
    pub const TYPE: &str = "EO-TYPE";
    pub const RANGE: &str = "EO-RANGE";
    pub const REQUIRED: &str = "EO-REQUIRED";
    pub const UNREACHABLE: &str = "EO-UNREACHABLE";
    pub const UNSUPPORTED: &str = "EO-UNSUPPORTED";
    pub const VIEW_MODE: &str = "EO-VIEW-MODE";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: &'static str,
    /// Where the problem sits, e.g. `Model Survivor/action_hunt/Condition`.
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: &'static str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.code, self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnalysisReport {
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl AnalysisReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn error(&mut self, d: Diagnostic) {
        self.errors.push(d);
    }

    pub fn warn(&mut self, d: Diagnostic) {
        self.warnings.push(d);
    }

    pub fn extend(&mut self, other: AnalysisReport) {
        self.errors.extend(other.errors);
        self.warnings.extend(other.warnings);
    }

    pub fn count(&self, code: &str) -> usize {
        self.errors
            .iter()
            .chain(&self.warnings)
            .filter(|d| d.code == code)
            .count()
    }

    pub fn diagnostics(&self) -> impl Iterator<Item = (Severity, &Diagnostic)> {
        self.errors
            .iter()
            .map(|d| (Severity::Error, d))
            .chain(self.warnings.iter().map(|d| (Severity::Warning, d)))
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (severity, d) in self.diagnostics() {
            let tag = match severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{tag}: {d}")?;
        }
        write!(
            f,
            "{} error(s), {} warning(s)",
            self.errors.len(),
            self.warnings.len()
        )
    }
}
