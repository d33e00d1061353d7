//! Concrete syntax: `.dict` source programs and `.sysf` target files.
//!
//! ```text
//! tycon Int;
//! tycon Maybe 1;
//! class Eq;
//! instance $fEqMaybe : forall a. Eq a => Eq (Maybe a);
//! prim eq : forall a. Eq a => a -> a -> Bool;
//! sig f : Eq a => a -> Bool;
//! def f = \x. eq x x;
//! check g = f [| myEq as Eq a |];
//! ```

mod lexer;
mod parser;
mod pretty;
mod program;

use thiserror::Error;

use crate::syntax::{Scheme, SrcExpr, TargetTerm, TargetType};

pub use lexer::{is_keyword, KEYWORDS};
pub use pretty::{
    pretty_constraint, pretty_expr, pretty_program, pretty_scheme, pretty_src_type,
    pretty_sysf_file, pretty_target, pretty_target_type,
};
pub use program::{Check, Def, Program, ProgramError, SourceMap, Span};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: equality constraints are not supported")]
    EqualityConstraint { line: usize, col: usize },
}

impl ParseError {
    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. } | ParseError::EqualityConstraint { line, col } => {
                (*line, *col)
            }
        }
    }
}

/// Contents of a `.sysf` file: typed declarations and an optional final term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SysfFile {
    pub items: Vec<SysfItem>,
    pub main: Option<TargetTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SysfItem {
    /// An opaque constant, e.g. an instance or a primitive.
    Val(String, TargetType),
    Def(String, TargetType, TargetTerm),
}

impl SysfItem {
    pub fn name(&self) -> &str {
        match self {
            SysfItem::Val(n, _) | SysfItem::Def(n, _, _) => n,
        }
    }

    pub fn ty(&self) -> &TargetType {
        match self {
            SysfItem::Val(_, t) | SysfItem::Def(_, t, _) => t,
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, ProgramError> {
    parse_program_with_spans(text).map(|(p, _)| p)
}

pub fn parse_program_with_spans(text: &str) -> Result<(Program, SourceMap), ProgramError> {
    let mut p = parser::Parser::new(text)?;
    let items = p.items()?;
    program::build_program(items)
}

pub fn parse_target(text: &str) -> Result<TargetTerm, ParseError> {
    let mut p = parser::Parser::new(text)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_target_type(text: &str) -> Result<TargetType, ParseError> {
    let mut p = parser::Parser::new(text)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_sysf(text: &str) -> Result<SysfFile, ParseError> {
    parser::Parser::new(text)?.sysf_file()
}

/// A source scheme; free variables are implicitly quantified when there is no `forall`.
pub fn parse_scheme(text: &str) -> Result<Scheme, ParseError> {
    let mut p = parser::Parser::new(text)?;
    let s = p.scheme()?;
    p.expect_eof()?;
    Ok(s)
}

pub fn parse_expr(text: &str) -> Result<SrcExpr, ParseError> {
    let mut p = parser::Parser::new(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}
