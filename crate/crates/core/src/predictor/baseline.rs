use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Annotation, MethodSample, PrivacyLabel};
use crate::java_stmt::{FuncCallPrecedence, MethodCode, StatementCategory};

/// Number of ranked positions the prior models.
pub const POSITIONS: usize = 3;

type PositionTables = Vec<BTreeMap<StatementCategory, f64>>;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("training set contains no selections")]
    EmptyTrainingSet,
    #[error("no extracted statements for sample `{0}`")]
    MissingMethod(String),
    #[error("sample `{sample_id}` has no statement {index}")]
    MissingStatement { sample_id: String, index: usize },
    #[error("smoothing constant must be positive, got {0}")]
    NonPositiveAlpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub alpha: f64,
    pub per_label: bool,
    pub mode: FuncCallPrecedence,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            per_label: false,
            mode: FuncCallPrecedence::On,
        }
    }
}

/// Laplace-smoothed P(category | position), optionally also conditioned on label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryPrior {
    pub alpha: f64,
    pub mode: FuncCallPrecedence,
    pub positions: PositionTables,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub by_label: BTreeMap<PrivacyLabel, PositionTables>,
}

/// Anything that can rank a statement category at a 0-based position.
pub trait PositionScorer {
    fn score(&self, category: StatementCategory, position: usize, label: PrivacyLabel) -> f64;
}

impl CategoryPrior {
    pub fn probability(
        &self,
        category: StatementCategory,
        position: usize,
        label: Option<PrivacyLabel>,
    ) -> f64 {
        let tables = label
            .and_then(|l| self.by_label.get(&l))
            .unwrap_or(&self.positions);
        let pos = position.min(POSITIONS - 1);
        tables[pos].get(&category).copied().unwrap_or(0.0)
    }
}

impl PositionScorer for CategoryPrior {
    fn score(&self, category: StatementCategory, position: usize, label: PrivacyLabel) -> f64 {
        self.probability(category, position, Some(label))
    }
}

fn smooth(
    counts: &[HashMap<StatementCategory, usize>],
    alpha: f64,
    mode: FuncCallPrecedence,
) -> PositionTables {
    let universe: Vec<_> = StatementCategory::universe(mode).collect();
    counts
        .iter()
        .map(|row| {
            let total: usize = row.values().sum();
            let denom = total as f64 + alpha * universe.len() as f64;
            universe
                .iter()
                .map(|&c| {
                    (
                        c,
                        (row.get(&c).copied().unwrap_or(0) as f64 + alpha) / denom,
                    )
                })
                .collect()
        })
        .collect()
}

pub fn train_baseline(
    annotations: &[Annotation],
    samples: &[MethodSample],
    methods: &[MethodCode],
    config: BaselineConfig,
) -> Result<CategoryPrior, BaselineError> {
    if config.alpha.is_nan() || config.alpha <= 0.0 {
        return Err(BaselineError::NonPositiveAlpha(config.alpha));
    }
    let methods: HashMap<&str, &MethodCode> =
        methods.iter().map(|m| (m.sample_id.as_str(), m)).collect();
    let labels: HashMap<&str, PrivacyLabel> =
        samples.iter().map(|s| (s.id.as_str(), s.label)).collect();

    let empty = || vec![HashMap::new(); POSITIONS];
    let mut global = empty();
    let mut per_label: BTreeMap<PrivacyLabel, Vec<HashMap<StatementCategory, usize>>> =
        BTreeMap::new();
    let mut seen = 0usize;

    for a in annotations {
        if a.selections.is_empty() {
            continue;
        }
        let method = methods
            .get(a.sample_id.as_str())
            .ok_or_else(|| BaselineError::MissingMethod(a.sample_id.clone()))?;
        for (pos, sel) in a.selections.iter().enumerate().take(POSITIONS) {
            let stmt = method.statements.get(sel.statement_index).ok_or_else(|| {
                BaselineError::MissingStatement {
                    sample_id: a.sample_id.clone(),
                    index: sel.statement_index,
                }
            })?;
            let cat = stmt.category_for(config.mode);
            *global[pos].entry(cat).or_default() += 1;
            if config.per_label {
                if let Some(&label) = labels.get(a.sample_id.as_str()) {
                    *per_label.entry(label).or_insert_with(empty)[pos]
                        .entry(cat)
                        .or_default() += 1;
                }
            }
            seen += 1;
        }
    }
    if seen == 0 {
        return Err(BaselineError::EmptyTrainingSet);
    }

    let by_label = if config.per_label {
        PrivacyLabel::ALL
            .into_iter()
            .map(|l| {
                let counts = per_label.remove(&l).unwrap_or_else(empty);
                (l, smooth(&counts, config.alpha, config.mode))
            })
            .collect()
    } else {
        BTreeMap::new()
    };

    Ok(CategoryPrior {
        alpha: config.alpha,
        mode: config.mode,
        positions: smooth(&global, config.alpha, config.mode),
        by_label,
    })
}

/// Greedy top-`k` pick: at each position the unchosen statement with the highest
/// score wins, ties going to the earlier line and then the lower index.
pub fn predict_with(
    scorer: &impl PositionScorer,
    method: &MethodCode,
    label: PrivacyLabel,
    mode: FuncCallPrecedence,
    k: usize,
) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for pos in 0..k.min(method.statements.len()) {
        let best = method
            .statements
            .iter()
            .filter(|s| !chosen.contains(&s.index))
            .map(|s| (scorer.score(s.category_for(mode), pos, label), s))
            .reduce(|best, cand| {
                let better = cand.0 > best.0
                    || (cand.0 == best.0
                        && (cand.1.line_start, cand.1.index) < (best.1.line_start, best.1.index));
                if better {
                    cand
                } else {
                    best
                }
            });
        match best {
            Some((_, s)) => chosen.push(s.index),
            None => break,
        }
    }
    chosen
}

pub fn predict_baseline(
    method: &MethodCode,
    label: PrivacyLabel,
    prior: &CategoryPrior,
    k: usize,
) -> Vec<usize> {
    predict_with(prior, method, label, prior.mode, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Selection;
    use crate::java_stmt::extract;
    use proptest::prelude::*;

    const CODE: &str = "void f(int a) {\n  int x = 1;\n  call();\n  if (a > 0) {\n    return;\n  }\n  int y = 2;\n}";

    fn fixture() -> (Vec<MethodSample>, Vec<MethodCode>) {
        let s = MethodSample {
            id: "m".into(),
            code: CODE.into(),
            label: PrivacyLabel::Analytics,
            project: None,
        };
        let m = extract("m", CODE).unwrap();
        (vec![s], vec![m])
    }

    fn ann(indices: &[usize]) -> Annotation {
        Annotation {
            sample_id: "m".into(),
            annotator_id: "a".into(),
            none_relevant: false,
            selections: indices
                .iter()
                .enumerate()
                .map(|(i, &idx)| Selection {
                    order: i as u8 + 1,
                    statement_index: idx,
                    rationale: None,
                })
                .collect(),
        }
    }

    #[test]
    fn rows_sum_to_one_and_stay_positive() {
        let (s, m) = fixture();
        for per_label in [false, true] {
            let cfg = BaselineConfig {
                per_label,
                ..Default::default()
            };
            let prior = train_baseline(&[ann(&[1, 3, 2])], &s, &m, cfg).unwrap();
            let tables = std::iter::once(&prior.positions).chain(prior.by_label.values());
            for t in tables {
                for row in t {
                    let sum: f64 = row.values().sum();
                    assert!((sum - 1.0).abs() < 1e-9);
                    assert!(row.values().all(|&p| p > 0.0));
                }
            }
        }
    }

    #[test]
    fn tiny_alpha_concentrates_on_observed_category() {
        let (s, m) = fixture();
        let cfg = BaselineConfig {
            alpha: 1e-9,
            mode: FuncCallPrecedence::Off,
            ..Default::default()
        };
        let prior = train_baseline(&[ann(&[1]), ann(&[5])], &s, &m, cfg).unwrap();
        let p = prior.probability(StatementCategory::DeclStmt, 0, None);
        assert!(p > 1.0 - 1e-6, "{p}");
    }

    #[test]
    fn huge_alpha_flattens_to_uniform() {
        let (s, m) = fixture();
        let cfg = BaselineConfig {
            alpha: 1e12,
            ..Default::default()
        };
        let prior = train_baseline(&[ann(&[1, 2])], &s, &m, cfg).unwrap();
        let n = StatementCategory::universe(FuncCallPrecedence::On).count() as f64;
        for row in &prior.positions {
            assert!(row.values().all(|&p| (p - 1.0 / n).abs() < 1e-9));
        }
    }

    #[test]
    fn empty_training_set() {
        let (s, m) = fixture();
        let mut none = ann(&[]);
        none.none_relevant = true;
        assert!(matches!(
            train_baseline(&[none], &s, &m, BaselineConfig::default()),
            Err(BaselineError::EmptyTrainingSet)
        ));
    }

    #[test]
    fn argmax_and_tie_break() {
        let (s, m) = fixture();
        // first picks: the call, then the two declarations in line order
        let prior = train_baseline(&[ann(&[2, 1, 5])], &s, &m, BaselineConfig::default()).unwrap();
        assert_eq!(
            predict_baseline(&m[0], PrivacyLabel::Analytics, &prior, 3),
            [2, 1, 5]
        );
    }

    #[test]
    fn short_methods_give_short_predictions() {
        let (s, m) = fixture();
        let prior = train_baseline(&[ann(&[1])], &s, &m, BaselineConfig::default()).unwrap();
        let small = extract("t", "void g() { a(); }").unwrap();
        assert_eq!(
            predict_baseline(&small, PrivacyLabel::Other, &prior, 3).len(),
            2
        );
    }

    struct Scaled<'a>(&'a CategoryPrior, [f64; POSITIONS]);

    impl PositionScorer for Scaled<'_> {
        fn score(&self, c: StatementCategory, pos: usize, l: PrivacyLabel) -> f64 {
            self.0.score(c, pos, l) * self.1[pos.min(POSITIONS - 1)]
        }
    }

    proptest! {
        #[test]
        fn prediction_shape_and_scale_invariance(
            picks in prop::collection::vec(prop::collection::vec(0usize..6, 1..4), 1..6),
            scale in prop::array::uniform3(0.001f64..1000.0),
            k in 0usize..8,
        ) {
            let (s, m) = fixture();
            let anns: Vec<_> = picks
                .iter()
                .map(|p| {
                    let mut d = p.clone();
                    d.dedup();
                    let mut uniq = Vec::new();
                    for i in d { if !uniq.contains(&i) { uniq.push(i); } }
                    ann(&uniq)
                })
                .collect();
            let prior = train_baseline(&anns, &s, &m, BaselineConfig::default()).unwrap();
            let got = predict_baseline(&m[0], PrivacyLabel::Analytics, &prior, k);
            prop_assert!(got.len() <= k.min(m[0].statements.len()));
            let mut uniq = got.clone();
            uniq.sort();
            uniq.dedup();
            prop_assert_eq!(uniq.len(), got.len());
            let scaled = predict_with(&Scaled(&prior, scale), &m[0], PrivacyLabel::Analytics, prior.mode, k);
            prop_assert_eq!(scaled, got);
        }
    }
}
