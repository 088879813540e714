//! Prompt rendering for statement-prediction models and completion parsing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Annotation, MethodSample, MAX_SELECTIONS};
use crate::java_stmt::MethodCode;

pub const TERMINATOR: &str = "</s>";
const ESCAPED_TERMINATOR: &str = "<\\/s>";
const STATEMENT_OPEN: &str = "STATEMENT:<s>\t";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub sample_id: String,
    pub annotator_id: String,
    pub training_text: String,
    pub inference_prefix: String,
    pub targets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("annotation of `{sample_id}` by `{annotator_id}` selects no statements")]
    EmptyAnnotation {
        sample_id: String,
        annotator_id: String,
    },
    #[error("sample `{sample_id}` has no statement {index}")]
    MissingStatement { sample_id: String, index: usize },
    #[error("no sample `{0}` among the loaded samples")]
    UnknownSample(String),
    #[error("unknown token scheme `{0}`")]
    UnknownScheme(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenScheme {
    #[default]
    Whitespace,
}

impl FromStr for TokenScheme {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "whitespace" => Ok(Self::Whitespace),
            other => Err(PromptError::UnknownScheme(other.to_string())),
        }
    }
}

impl fmt::Display for TokenScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Whitespace => f.write_str("whitespace"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenBudget {
    pub max_tokens: usize,
    pub scheme: TokenScheme,
}

impl Default for TokenBudget {
    fn default() -> Self {
        Self {
            max_tokens: 256,
            scheme: TokenScheme::Whitespace,
        }
    }
}

impl TokenBudget {
    pub fn new(max_tokens: usize, scheme: TokenScheme) -> Option<Self> {
        (max_tokens > 0).then_some(Self { max_tokens, scheme })
    }
}

pub fn count_tokens(text: &str, scheme: TokenScheme) -> usize {
    match scheme {
        TokenScheme::Whitespace => text.split_whitespace().count(),
    }
}

/// Byte offset just past the `n`th token, or `None` when the text has fewer tokens.
fn end_of_nth_token(text: &str, n: usize, scheme: TokenScheme) -> Option<usize> {
    match scheme {
        TokenScheme::Whitespace => {
            let mut seen = 0;
            let mut in_token = false;
            for (i, c) in text.char_indices() {
                if c.is_whitespace() {
                    if in_token && seen == n {
                        return Some(i);
                    }
                    in_token = false;
                } else if !in_token {
                    in_token = true;
                    seen += 1;
                }
            }
            (in_token && seen == n).then_some(text.len())
        }
    }
}

fn escape_statement(text: &str) -> String {
    text.replace('\t', " ")
        .replace(TERMINATOR, ESCAPED_TERMINATOR)
}

fn unescape_statement(text: &str) -> String {
    text.replace(ESCAPED_TERMINATOR, TERMINATOR)
}

pub fn render_inference(sample: &MethodSample) -> String {
    format!(
        "CODE:\t{}\nLABEL:\t{}\n{STATEMENT_OPEN}",
        sample.code, sample.label
    )
}

pub fn render_training(
    sample: &MethodSample,
    annotation: &Annotation,
    method: &MethodCode,
) -> Result<PromptRecord, PromptError> {
    if annotation.selections.is_empty() {
        return Err(PromptError::EmptyAnnotation {
            sample_id: annotation.sample_id.clone(),
            annotator_id: annotation.annotator_id.clone(),
        });
    }
    let mut targets = Vec::with_capacity(annotation.selections.len());
    for sel in &annotation.selections {
        let stmt = method.statements.get(sel.statement_index).ok_or_else(|| {
            PromptError::MissingStatement {
                sample_id: sample.id.clone(),
                index: sel.statement_index,
            }
        })?;
        targets.push(stmt.text.clone());
    }
    let inference_prefix = render_inference(sample);
    let body: Vec<String> = targets.iter().map(|t| escape_statement(t)).collect();
    let training_text = format!("{inference_prefix}{}{TERMINATOR}", body.join("\t"));
    Ok(PromptRecord {
        sample_id: sample.id.clone(),
        annotator_id: annotation.annotator_id.clone(),
        training_text,
        inference_prefix,
        targets,
    })
}

/// One record per annotation with selections, in annotation order.
pub fn render_all(
    samples: &[MethodSample],
    annotations: &[Annotation],
    methods: &[MethodCode],
) -> Result<Vec<PromptRecord>, PromptError> {
    let sample_at = |id: &str| samples.iter().position(|s| s.id == id);
    let method_at = |id: &str| methods.iter().position(|m| m.sample_id == id);
    let mut out = Vec::new();
    for a in annotations.iter().filter(|a| !a.none_relevant) {
        let (Some(si), Some(mi)) = (sample_at(&a.sample_id), method_at(&a.sample_id)) else {
            return Err(PromptError::UnknownSample(a.sample_id.clone()));
        };
        out.push(render_training(&samples[si], a, &methods[mi])?);
    }
    Ok(out)
}

/// Training prompts separated by blank lines.
pub fn export_plain(records: &[PromptRecord]) -> String {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        out.push_str(&r.training_text);
    }
    out.push('\n');
    out
}

/// Statement texts from a model completion, at most three.
pub fn parse_completion(completion: &str, budget: TokenBudget) -> Vec<String> {
    let mut cut = completion.find(TERMINATOR).unwrap_or(completion.len());
    if let Some(end) = end_of_nth_token(completion, budget.max_tokens, budget.scheme) {
        cut = cut.min(end);
    }
    completion[..cut]
        .split('\t')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .take(MAX_SELECTIONS)
        .map(unescape_statement)
        .collect()
}
