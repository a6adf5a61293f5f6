//! Command-line front end for `bxlens` and the lens-file format.

pub mod commands;
pub mod demos;
pub mod export;
pub mod format;
pub mod lexer;
pub mod report;

use std::fmt;

pub use commands::{run, Cli, Command, Settings};
pub use format::{parse, render, LensFile};
pub use report::Outcome;

/// A parse or validation error at a source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for Diagnostic {}
