use thiserror::Error;

use crate::dsl::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),
    /// An operation applied outside its domain, e.g. shifting a path that is too short.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request needs a finite boundary space (or similar) and the graph does not have one.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("composition error: {0}")]
    Composition(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{}", format_diagnostics(.0))]
    Parse(Vec<Diagnostic>),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
