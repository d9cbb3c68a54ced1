//! Built-in simulator domains.

pub mod grid;
pub mod pentest;
pub mod puzznic;

use thiserror::Error;

pub use grid::{GridProblem, GridWorld, Move};
pub use pentest::{PentestProblem, PentestScenario};
pub use puzznic::{PuzznicAction, PuzznicLevel, PuzznicProblem};

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid level: {0}")]
    LevelInvalid(String),
    #[error("invalid scenario: {0}")]
    ScenarioInvalid(String),
    #[error("action {0} is not applicable")]
    InapplicableAction(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn parse_error(line: usize, message: impl Into<String>) -> DomainError {
    DomainError::Parse {
        line,
        message: message.into(),
    }
}

/// Non-comment, non-blank lines of an ASCII map with their 1-based line numbers.
pub(crate) fn map_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with(';'))
}
