//! Toolkit for locating privacy-relevant statements in Java/Android methods.

pub mod annotate;
pub mod corpus;
pub mod java_stmt;
pub mod metrics;
pub mod predictor;
pub mod promptgen;

pub use corpus::{Annotation, MethodSample, PrivacyLabel, Selection, SplitSpec};
pub use java_stmt::{FuncCallPrecedence, MethodCode, Statement, StatementCategory};
pub use metrics::{Evaluation, OverlapHistogram, OverlapResult, Pairing};
pub use predictor::{CategoryPrior, Prediction};
pub use promptgen::{PromptRecord, TokenBudget};
