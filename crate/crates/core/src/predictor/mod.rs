//! Top-3 statement predictors and mapping of predicted text back to statements.

pub mod adapter;
mod baseline;

use serde::{Deserialize, Serialize};

use crate::java_stmt::{normalize_whitespace, MethodCode};

pub use adapter::{adapter_predict, AdapterConfig, AdapterError};
pub use baseline::{
    predict_baseline, predict_with, train_baseline, BaselineConfig, BaselineError, CategoryPrior,
    PositionScorer, POSITIONS,
};

/// One row of predictions.jsonl.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub sample_id: String,
    pub texts: Vec<String>,
    pub indices: Vec<Option<usize>>,
}

impl Prediction {
    pub fn from_indices(method: &MethodCode, indices: &[usize]) -> Self {
        Self {
            sample_id: method.sample_id.clone(),
            texts: indices
                .iter()
                .map(|&i| method.statements[i].text.clone())
                .collect(),
            indices: indices.iter().map(|&i| Some(i)).collect(),
        }
    }

    pub fn from_texts(method: &MethodCode, texts: Vec<String>) -> Self {
        let indices = texts.iter().map(|t| match_statement(t, method)).collect();
        Self {
            sample_id: method.sample_id.clone(),
            texts,
            indices,
        }
    }
}

/// Index of the first statement whose normalized text equals the normalized `text`.
pub fn match_statement(text: &str, method: &MethodCode) -> Option<usize> {
    let wanted = normalize_whitespace(text);
    method
        .statements
        .iter()
        .find(|s| s.normalized_text == wanted)
        .map(|s| s.index)
}
