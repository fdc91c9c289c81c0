//! Boldsea Semantic Language front end: tokenizer, parser and pretty-printer.
//!
//! ```text
//! Concept: Instance: Survivor
//! Attribute: Individual: warmth
//! : DataType: Numeric
//! Survivor: Model: Model Survivor
//! : Attribute: warmthLow
//! :: SetValue: +$.warmth < +$.warmthMin
//! Survivor: Individual: John Doe
//! : SetModel: Model Survivor
//! : warmth: 50
//! ```

mod ast;
mod expr;
mod lexer;
mod parser;
mod printer;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use ast::*;
pub use expr::{parse_expression, parse_setdo};
pub use lexer::{tokenize, tokenize_expression, Tok, Token};
pub use parser::parse_document;
pub use printer::{print_expression, print_literal, print_setdo, pretty_print};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Location {
    pub line: u32,
    pub col: u32,
}

impl Location {
    pub fn new(line: u32, col: u32) -> Self {
        Location { line, col }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BslError {
    #[error("{loc}: {message}")]
    Lex { loc: Location, message: String },
    #[error("{loc}: expected {}, found {found}", expected.join(" or "))]
    Parse {
        loc: Location,
        expected: Vec<String>,
        found: String,
    },
    #[error("{loc}: invalid expression: {message}")]
    Expr { loc: Location, message: String },
    #[error("{loc}: invalid SetDo: {message}")]
    SetDo { loc: Location, message: String },
}

impl BslError {
    pub(crate) fn lex(loc: Location, message: impl Into<String>) -> Self {
        BslError::Lex {
            loc,
            message: message.into(),
        }
    }

    pub(crate) fn parse(loc: Location, expected: &[&str], found: impl Into<String>) -> Self {
        BslError::Parse {
            loc,
            expected: expected.iter().map(|s| String::from(*s)).collect(),
            found: found.into(),
        }
    }

    pub fn location(&self) -> Location {
        match self {
            BslError::Lex { loc, .. }
            | BslError::Parse { loc, .. }
            | BslError::Expr { loc, .. }
            | BslError::SetDo { loc, .. } => *loc,
        }
    }
}
