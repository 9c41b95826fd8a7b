//! Textual `.arch` format.
//!
//! ```text
//! keys CKey, CKeyP
//! pair(CKey, CKeyP)
//! secrets N
//! channels ch1, ch2
//! component A { ins ch1; out ch2; keys CKey; }
//! expr ch1: enc(CKey, [secret(N)])
//! ```
//!
//! Names must be declared before they are referenced. `#` starts a comment
//! and newlines inside brackets or braces are insignificant.

mod parser;
mod render;

use thiserror::Error;

use crate::error::Error;

pub use parser::{parse_architecture, parse_bytes, parse_expr, parse_expr_list, MAX_NESTING};
pub use render::{render_architecture, HEADER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("{line}:{column}: expected {expected}, found {found}")]
    Parse {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    /// A declaration error tied to a source position: an undeclared or
    /// duplicate name.
    #[error("{line}:{column}: {error}")]
    Invalid {
        line: usize,
        column: usize,
        error: Error,
    },
    /// A whole-document check failed, such as a subcomponent cycle.
    #[error("{0}")]
    Validation(Error),
}

impl FormatError {
    fn parse(
        line: usize,
        column: usize,
        expected: impl Into<String>,
        found: impl Into<String>,
    ) -> Self {
        FormatError::Parse {
            line,
            column,
            expected: expected.into(),
            found: found.into(),
        }
    }

    fn invalid(line: usize, column: usize, error: Error) -> Self {
        FormatError::Invalid {
            line,
            column,
            error,
        }
    }

    /// The underlying model error, for declaration and validation failures.
    pub fn model_error(&self) -> Option<&Error> {
        match self {
            FormatError::Parse { .. } => None,
            FormatError::Invalid { error, .. } | FormatError::Validation(error) => Some(error),
        }
    }
}

#[cfg(test)]
mod tests;
