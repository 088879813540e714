use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::corpus::{Annotation, MAX_SELECTIONS};
use crate::predictor::Prediction;

/// Number of distinct matched predictions that appear anywhere in the reference.
pub fn overlap_any_order(pred: &[Option<usize>], reference: &[usize]) -> usize {
    let mut hits: Vec<usize> = pred
        .iter()
        .flatten()
        .copied()
        .filter(|i| reference.contains(i))
        .collect();
    hits.sort_unstable();
    hits.dedup();
    hits.len()
}

/// Number of positions where prediction and reference agree exactly.
pub fn overlap_in_order(pred: &[Option<usize>], reference: &[usize]) -> usize {
    pred.iter()
        .zip(reference)
        .filter(|(p, r)| **p == Some(**r))
        .count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapResult {
    pub sample_id: String,
    pub annotator_id: String,
    pub slot: String,
    pub any_order: usize,
    pub in_order: usize,
}

pub const LEVELS: usize = MAX_SELECTIONS + 1;

/// Counts and percentages of pairs at each overlap level 0..=3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapHistogram {
    pub counts: [usize; LEVELS],
    pub percentages: [f64; LEVELS],
}

impl OverlapHistogram {
    pub fn from_levels(levels: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = [0; LEVELS];
        for l in levels {
            counts[l.min(LEVELS - 1)] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn from_counts(counts: [usize; LEVELS]) -> Self {
        let total: usize = counts.iter().sum();
        let percentages = if total == 0 {
            [0.0; LEVELS]
        } else {
            counts.map(|c| 100.0 * c as f64 / total as f64)
        };
        Self {
            counts,
            percentages,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramPair {
    pub any_order: OverlapHistogram,
    pub in_order: OverlapHistogram,
}

impl HistogramPair {
    fn of(results: &[&OverlapResult]) -> Self {
        Self {
            any_order: OverlapHistogram::from_levels(results.iter().map(|r| r.any_order)),
            in_order: OverlapHistogram::from_levels(results.iter().map(|r| r.in_order)),
        }
    }
}

/// Unweighted mean of the per-slot percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedPair {
    pub slots: usize,
    pub any_order: [f64; LEVELS],
    pub in_order: [f64; LEVELS],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    #[default]
    PerAnnotator,
    MaxOverAnnotators,
}

impl std::str::FromStr for Pairing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per_annotator" => Ok(Self::PerAnnotator),
            "max_over_annotators" => Ok(Self::MaxOverAnnotators),
            _ => Err(format!("unknown pairing `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub pairing: Pairing,
    /// Keyed by annotator slot ("A", "B", ...) and "pooled", or "max".
    pub histograms: BTreeMap<String, HistogramPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub average: Option<AveragedPair>,
    pub per_sample: Vec<OverlapResult>,
    pub excluded_none_relevant: usize,
}

pub const POOLED: &str = "pooled";
pub const MAX: &str = "max";

/// Slot name for the `i`th annotation of a sample, in file order.
pub fn slot_name(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

struct References<'a> {
    by_sample: HashMap<&'a str, Vec<&'a Annotation>>,
    none_relevant: HashMap<&'a str, usize>,
}

impl<'a> References<'a> {
    fn new(annotations: &'a [Annotation]) -> Self {
        let mut by_sample: HashMap<&str, Vec<&Annotation>> = HashMap::new();
        let mut none_relevant: HashMap<&str, usize> = HashMap::new();
        for a in annotations {
            if a.none_relevant || a.selections.is_empty() {
                *none_relevant.entry(a.sample_id.as_str()).or_default() += 1;
            } else {
                by_sample.entry(a.sample_id.as_str()).or_default().push(a);
            }
        }
        Self {
            by_sample,
            none_relevant,
        }
    }
}

fn truncated(pred: &[Option<usize>]) -> &[Option<usize>] {
    &pred[..pred.len().min(MAX_SELECTIONS)]
}

/// Scores predictions against reference annotations.
///
/// Annotations that mark nothing relevant are left out and counted. A prediction
/// whose sample has no annotation at all is an error.
pub fn evaluate(
    predictions: &[Prediction],
    annotations: &[Annotation],
    pairing: Pairing,
) -> Result<Evaluation, MetricsError> {
    let refs = References::new(annotations);
    let mut per_sample = Vec::new();
    let mut excluded = 0;

    for p in predictions {
        let id = p.sample_id.as_str();
        let skipped = refs.none_relevant.get(id).copied().unwrap_or(0);
        let Some(anns) = refs.by_sample.get(id) else {
            if skipped == 0 {
                return Err(MetricsError::MissingReference(p.sample_id.clone()));
            }
            excluded += skipped;
            continue;
        };
        excluded += skipped;
        let pred = truncated(&p.indices);
        let scored: Vec<OverlapResult> = anns
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let r = a.ranked_indices();
                OverlapResult {
                    sample_id: p.sample_id.clone(),
                    annotator_id: a.annotator_id.clone(),
                    slot: slot_name(i),
                    any_order: overlap_any_order(pred, &r),
                    in_order: overlap_in_order(pred, &r),
                }
            })
            .collect();
        match pairing {
            Pairing::PerAnnotator => per_sample.extend(scored),
            Pairing::MaxOverAnnotators => {
                let best_any = scored.iter().max_by_key(|r| r.any_order).expect("nonempty");
                per_sample.push(OverlapResult {
                    sample_id: p.sample_id.clone(),
                    annotator_id: best_any.annotator_id.clone(),
                    slot: MAX.to_string(),
                    any_order: best_any.any_order,
                    in_order: scored.iter().map(|r| r.in_order).max().unwrap_or(0),
                });
            }
        }
    }
    Ok(summarize(pairing, per_sample, excluded))
}

fn summarize(pairing: Pairing, per_sample: Vec<OverlapResult>, excluded: usize) -> Evaluation {
    let mut by_slot: BTreeMap<String, Vec<&OverlapResult>> = BTreeMap::new();
    for r in &per_sample {
        by_slot.entry(r.slot.clone()).or_default().push(r);
    }
    let mut histograms: BTreeMap<String, HistogramPair> = by_slot
        .iter()
        .map(|(slot, rs)| (slot.clone(), HistogramPair::of(rs)))
        .collect();

    let average = (pairing == Pairing::PerAnnotator && !histograms.is_empty()).then(|| {
        let n = histograms.len() as f64;
        let mut any_order = [0.0; LEVELS];
        let mut in_order = [0.0; LEVELS];
        for h in histograms.values() {
            for l in 0..LEVELS {
                any_order[l] += h.any_order.percentages[l] / n;
                in_order[l] += h.in_order.percentages[l] / n;
            }
        }
        AveragedPair {
            slots: histograms.len(),
            any_order,
            in_order,
        }
    });
    if pairing == Pairing::PerAnnotator {
        let all: Vec<&OverlapResult> = per_sample.iter().collect();
        histograms.insert(POOLED.to_string(), HistogramPair::of(&all));
    }

    Evaluation {
        pairing,
        histograms,
        average,
        per_sample,
        excluded_none_relevant: excluded,
    }
}

/// Agreement between the first two annotators of every sample that has two.
///
/// The second annotator's selections play the prediction, the first's the reference.
pub fn human_agreement(annotations: &[Annotation]) -> Evaluation {
    let refs = References::new(annotations);
    let mut ids: Vec<&&str> = refs.by_sample.keys().collect();
    ids.sort();
    let mut per_sample = Vec::new();
    let mut excluded = 0;
    for id in ids {
        let anns = &refs.by_sample[*id];
        if anns.len() < 2 {
            continue;
        }
        let (a, b) = (anns[0], anns[1]);
        let pred: Vec<Option<usize>> = b.ranked_indices().into_iter().map(Some).collect();
        let reference = a.ranked_indices();
        per_sample.push(OverlapResult {
            sample_id: id.to_string(),
            annotator_id: format!("{}|{}", a.annotator_id, b.annotator_id),
            slot: "human".to_string(),
            any_order: overlap_any_order(&pred, &reference),
            in_order: overlap_in_order(&pred, &reference),
        });
    }
    for (id, n) in &refs.none_relevant {
        let selecting = refs.by_sample.get(id).map_or(0, Vec::len);
        if selecting + n >= 2 {
            excluded += n;
        }
    }
    summarize(Pairing::PerAnnotator, per_sample, excluded)
}
