//! Java method statement segmentation and categorization.
//!
//! A lightweight scanner rather than a Java grammar: it tracks braces,
//! parentheses, literals and comments, which is enough to cut method
//! snippets that may not compile on their own into statements.

mod category;
mod lexer;
mod segment;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use category::{categorize, FuncCallPrecedence, StatementCategory};
pub use segment::{segment, RawStatement, StatementForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmentError {
    #[error("unbalanced source at line {line}: {what}")]
    Unbalanced { line: usize, what: &'static str },
    #[error("no statements found")]
    EmptySource,
    #[error("sample `{sample_id}`: {source}")]
    InSample {
        sample_id: String,
        #[source]
        source: Box<SegmentError>,
    },
}

/// One categorized statement of a method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub index: usize,
    pub text: String,
    pub normalized_text: String,
    pub line_start: usize,
    pub line_end: usize,
    pub category: StatementCategory,
    pub category_no_call: StatementCategory,
    pub depth: usize,
}

impl Statement {
    pub fn category_for(&self, precedence: FuncCallPrecedence) -> StatementCategory {
        match precedence {
            FuncCallPrecedence::On => self.category,
            FuncCallPrecedence::Off => self.category_no_call,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodCode {
    pub sample_id: String,
    pub source: String,
    pub statements: Vec<Statement>,
}

/// Trims and collapses every whitespace run to a single space.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Segments `source` and categorizes every statement under both precedence modes.
pub fn extract(sample_id: &str, source: &str) -> Result<MethodCode, SegmentError> {
    let raw = segment(source).map_err(|e| SegmentError::InSample {
        sample_id: sample_id.to_string(),
        source: Box::new(e),
    })?;
    let statements = raw
        .into_iter()
        .map(|r| Statement {
            category: categorize(&r.text, r.form, FuncCallPrecedence::On),
            category_no_call: categorize(&r.text, r.form, FuncCallPrecedence::Off),
            normalized_text: normalize_whitespace(&r.text),
            index: r.index,
            text: r.text,
            line_start: r.line_start,
            line_end: r.line_end,
            depth: r.depth,
        })
        .collect();
    Ok(MethodCode {
        sample_id: sample_id.to_string(),
        source: source.to_string(),
        statements,
    })
}
