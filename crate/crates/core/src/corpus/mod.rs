//! Samples, privacy labels, annotations and their JSONL persistence.

pub mod jsonl;
mod split;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use split::{default_val_count, make_split, SplitSpec};

/// Maximum number of statements an annotator may select for one sample.
pub const MAX_SELECTIONS: usize = 3;

/// The four "purpose" privacy labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PrivacyLabel {
    Advertisement,
    Functionality,
    Analytics,
    Other,
}

impl PrivacyLabel {
    pub const ALL: [PrivacyLabel; 4] = [
        Self::Advertisement,
        Self::Functionality,
        Self::Analytics,
        Self::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Advertisement => "Advertisement",
            Self::Functionality => "Functionality",
            Self::Analytics => "Analytics",
            Self::Other => "Other",
        }
    }

    /// Definition shown to annotators next to the label name.
    pub fn description(self) -> &'static str {
        match self {
            Self::Advertisement => {
                "when the personal data is being used for advertisement services."
            }
            Self::Functionality => {
                "when the personal data is being used for the functionality of the app."
            }
            Self::Analytics => {
                "when the personal data is being used for analytics in or outside the app."
            }
            Self::Other => "when the personal data is being used for other/unknown purposes.",
        }
    }
}

impl fmt::Display for PrivacyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrivacyLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown privacy label `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodSample {
    pub id: String,
    pub code: String,
    pub label: PrivacyLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub order: u8,
    pub statement_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub sample_id: String,
    pub annotator_id: String,
    #[serde(default)]
    pub none_relevant: bool,
    #[serde(default)]
    pub selections: Vec<Selection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotationError {
    #[error("selection orders must be 1..=n in ascending order")]
    NonContiguousOrder,
    #[error("statement {index} selected more than once")]
    DuplicateStatementIndex { index: usize },
    #[error("statement index {index} out of range ({count} statements)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("none_relevant annotation carries selections")]
    NoneRelevantWithSelections,
    #[error("more than {MAX_SELECTIONS} selections")]
    TooManySelections,
}

impl Annotation {
    /// Statement indices in selection order.
    pub fn ranked_indices(&self) -> Vec<usize> {
        self.selections.iter().map(|s| s.statement_index).collect()
    }

    /// Checks the structural invariants; `statement_count` additionally range-checks indices.
    pub fn validate(&self, statement_count: Option<usize>) -> Result<(), AnnotationError> {
        if self.none_relevant && !self.selections.is_empty() {
            return Err(AnnotationError::NoneRelevantWithSelections);
        }
        if self.selections.len() > MAX_SELECTIONS {
            return Err(AnnotationError::TooManySelections);
        }
        let contiguous = self
            .selections
            .iter()
            .enumerate()
            .all(|(i, s)| usize::from(s.order) == i + 1);
        if !contiguous {
            return Err(AnnotationError::NonContiguousOrder);
        }
        let mut seen = HashSet::new();
        for s in &self.selections {
            if !seen.insert(s.statement_index) {
                return Err(AnnotationError::DuplicateStatementIndex {
                    index: s.statement_index,
                });
            }
            if let Some(count) = statement_count {
                if s.statement_index >= count {
                    return Err(AnnotationError::IndexOutOfRange {
                        index: s.statement_index,
                        count,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("line {line}: duplicate sample id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: sample `{sample_id}`: {source}")]
    InvalidAnnotation {
        line: usize,
        sample_id: String,
        #[source]
        source: AnnotationError,
    },
    #[error("line {line}: annotation refers to unknown sample `{sample_id}`")]
    UnknownSample { line: usize, sample_id: String },
    #[error(
        "need more than {requested} singly-annotated samples for validation, found {available}"
    )]
    InsufficientSamples { available: usize, requested: usize },
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub fn load_samples(path: impl AsRef<Path>) -> Result<Vec<MethodSample>, CorpusError> {
    let rows: Vec<(usize, MethodSample)> = jsonl::read_records(path.as_ref())?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(rows.len());
    for (line, sample) in rows {
        if !seen.insert(sample.id.clone()) {
            return Err(CorpusError::DuplicateId {
                line,
                id: sample.id,
            });
        }
        out.push(sample);
    }
    Ok(out)
}

pub fn save_samples(samples: &[MethodSample], path: impl AsRef<Path>) -> Result<(), CorpusError> {
    jsonl::write_records(path.as_ref(), samples)
}

/// Loads annotations, enforcing their invariants.
///
/// With `statement_counts` (sample id to number of extracted statements), unknown
/// samples and out-of-range indices are rejected too.
pub fn load_annotations(
    path: impl AsRef<Path>,
    statement_counts: Option<&HashMap<String, usize>>,
) -> Result<Vec<Annotation>, CorpusError> {
    let rows: Vec<(usize, Annotation)> = jsonl::read_records(path.as_ref())?;
    let mut out = Vec::with_capacity(rows.len());
    for (line, ann) in rows {
        let count = match statement_counts {
            Some(counts) => match counts.get(&ann.sample_id) {
                Some(&n) => Some(n),
                None => {
                    return Err(CorpusError::UnknownSample {
                        line,
                        sample_id: ann.sample_id,
                    })
                }
            },
            None => None,
        };
        ann.validate(count).map_err(|source| match source {
            AnnotationError::NoneRelevantWithSelections | AnnotationError::TooManySelections => {
                CorpusError::Schema {
                    line,
                    message: source.to_string(),
                }
            }
            source => CorpusError::InvalidAnnotation {
                line,
                sample_id: ann.sample_id.clone(),
                source,
            },
        })?;
        out.push(ann);
    }
    Ok(out)
}

pub fn save_annotations(
    annotations: &[Annotation],
    path: impl AsRef<Path>,
) -> Result<(), CorpusError> {
    jsonl::write_records(path.as_ref(), annotations)
}

/// Groups annotations by sample id, preserving file order within each sample.
pub fn annotations_by_sample(annotations: &[Annotation]) -> HashMap<&str, Vec<&Annotation>> {
    let mut map: HashMap<&str, Vec<&Annotation>> = HashMap::new();
    for a in annotations {
        map.entry(a.sample_id.as_str()).or_default().push(a);
    }
    map
}
