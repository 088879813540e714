use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::corpus::{Annotation, MethodSample, PrivacyLabel, MAX_SELECTIONS};
use crate::java_stmt::{FuncCallPrecedence, MethodCode, StatementCategory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionSource {
    /// Every extracted statement.
    Statements,
    /// Only statements selected by annotators.
    Ratings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    All,
    ByOrder,
    ByLabel,
}

impl std::str::FromStr for DistributionSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "statements" => Ok(Self::Statements),
            "ratings" => Ok(Self::Ratings),
            _ => Err(format!("unknown distribution source `{s}`")),
        }
    }
}

impl std::str::FromStr for Grouping {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Self::All),
            "by_order" => Ok(Self::ByOrder),
            "by_label" => Ok(Self::ByLabel),
            _ => Err(format!("unknown grouping `{s}`")),
        }
    }
}

pub const ORDER_GROUPS: [&str; MAX_SELECTIONS] = ["first", "second", "third"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionGroup {
    pub name: String,
    pub total: usize,
    pub counts: BTreeMap<StatementCategory, usize>,
    pub frequencies: BTreeMap<StatementCategory, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryDistribution {
    pub source: DistributionSource,
    pub grouping: Grouping,
    pub funccall_mode: FuncCallPrecedence,
    pub groups: Vec<DistributionGroup>,
    /// Groups with nothing to count; left out of `groups`.
    pub empty_groups: Vec<String>,
}

impl CategoryDistribution {
    pub fn group(&self, name: &str) -> Option<&DistributionGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    /// Frequency of `category` in group `name` as a percentage.
    pub fn percent(&self, name: &str, category: StatementCategory) -> Option<f64> {
        self.group(name)
            .map(|g| 100.0 * g.frequencies.get(&category).copied().unwrap_or(0.0))
    }
}

fn group_names(grouping: Grouping) -> Vec<String> {
    match grouping {
        Grouping::All => vec!["all".to_string()],
        Grouping::ByOrder => ORDER_GROUPS.iter().map(|s| s.to_string()).collect(),
        Grouping::ByLabel => PrivacyLabel::ALL.iter().map(|l| l.to_string()).collect(),
    }
}

/// Normalized category frequencies, per group.
///
/// `annotations` is only read for the ratings source.
pub fn distribution(
    samples: &[MethodSample],
    methods: &[MethodCode],
    annotations: &[Annotation],
    source: DistributionSource,
    grouping: Grouping,
    mode: FuncCallPrecedence,
) -> Result<CategoryDistribution, MetricsError> {
    if source == DistributionSource::Statements && grouping == Grouping::ByOrder {
        return Err(MetricsError::UnsupportedGrouping(
            "statement distributions have no selection order".into(),
        ));
    }
    let methods: HashMap<&str, &MethodCode> =
        methods.iter().map(|m| (m.sample_id.as_str(), m)).collect();
    let labels: HashMap<&str, PrivacyLabel> =
        samples.iter().map(|s| (s.id.as_str(), s.label)).collect();
    let names = group_names(grouping);
    let mut counts: Vec<BTreeMap<StatementCategory, usize>> = vec![BTreeMap::new(); names.len()];

    let label_group = |sample_id: &str| -> Result<usize, MetricsError> {
        let label = labels
            .get(sample_id)
            .ok_or_else(|| MetricsError::UnknownSample(sample_id.to_string()))?;
        Ok(PrivacyLabel::ALL
            .iter()
            .position(|l| l == label)
            .expect("label in ALL"))
    };

    match source {
        DistributionSource::Statements => {
            for s in samples {
                let m = methods
                    .get(s.id.as_str())
                    .ok_or_else(|| MetricsError::MissingMethod(s.id.clone()))?;
                let g = match grouping {
                    Grouping::ByLabel => label_group(&s.id)?,
                    _ => 0,
                };
                for st in &m.statements {
                    *counts[g].entry(st.category_for(mode)).or_default() += 1;
                }
            }
        }
        DistributionSource::Ratings => {
            for a in annotations {
                if a.selections.is_empty() {
                    continue;
                }
                let m = methods
                    .get(a.sample_id.as_str())
                    .ok_or_else(|| MetricsError::MissingMethod(a.sample_id.clone()))?;
                let label_g = match grouping {
                    Grouping::ByLabel => label_group(&a.sample_id)?,
                    _ => 0,
                };
                for (pos, sel) in a.selections.iter().enumerate().take(MAX_SELECTIONS) {
                    let st = m.statements.get(sel.statement_index).ok_or_else(|| {
                        MetricsError::MissingStatement {
                            sample_id: a.sample_id.clone(),
                            index: sel.statement_index,
                        }
                    })?;
                    let g = if grouping == Grouping::ByOrder {
                        pos
                    } else {
                        label_g
                    };
                    *counts[g].entry(st.category_for(mode)).or_default() += 1;
                }
            }
        }
    }

    let mut groups = Vec::new();
    let mut empty_groups = Vec::new();
    for (name, row) in names.into_iter().zip(counts) {
        let total: usize = row.values().sum();
        if total == 0 {
            empty_groups.push(name);
            continue;
        }
        let frequencies = StatementCategory::universe(mode)
            .map(|c| (c, row.get(&c).copied().unwrap_or(0) as f64 / total as f64))
            .collect();
        groups.push(DistributionGroup {
            name,
            total,
            counts: row,
            frequencies,
        });
    }

    Ok(CategoryDistribution {
        source,
        grouping,
        funccall_mode: mode,
        groups,
        empty_groups,
    })
}
