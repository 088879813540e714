//! Overlap agreement between ranked statement selections and category distributions.

mod distribution;
mod overlap;

use std::fmt::Write;

use thiserror::Error;

pub use distribution::{
    distribution, CategoryDistribution, DistributionGroup, DistributionSource, Grouping,
    ORDER_GROUPS,
};
pub use overlap::{
    evaluate, human_agreement, overlap_any_order, overlap_in_order, slot_name, AveragedPair,
    Evaluation, HistogramPair, OverlapHistogram, OverlapResult, Pairing, LEVELS, MAX, POOLED,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no reference annotation for sample `{0}`")]
    MissingReference(String),
    #[error("no extracted statements for sample `{0}`")]
    MissingMethod(String),
    #[error("sample `{sample_id}` has no statement {index}")]
    MissingStatement { sample_id: String, index: usize },
    #[error("annotation refers to unknown sample `{0}`")]
    UnknownSample(String),
    #[error("{0}")]
    UnsupportedGrouping(String),
}

const LEVEL_NAMES: [&str; LEVELS] = ["zero", "one", "two", "three"];

/// Overlap percentages as an aligned table, highest level first.
pub fn format_evaluation(e: &Evaluation) -> String {
    let mut columns: Vec<(String, [f64; LEVELS], [f64; LEVELS])> = e
        .histograms
        .iter()
        .map(|(k, h)| (k.clone(), h.any_order.percentages, h.in_order.percentages))
        .collect();
    if let Some(avg) = &e.average {
        columns.push(("average".to_string(), avg.any_order, avg.in_order));
    }
    let mut out = String::new();
    for (title, pick) in [("any order", 1), ("in order", 2)] {
        let _ = write!(out, "{title:<10}");
        for c in &columns {
            let _ = write!(out, "{:>10}", c.0);
        }
        out.push('\n');
        for level in (0..LEVELS).rev() {
            let _ = write!(out, "{:<10}", LEVEL_NAMES[level]);
            for c in &columns {
                let v = if pick == 1 { c.1[level] } else { c.2[level] };
                let _ = write!(out, "{v:>10.2}");
            }
            out.push('\n');
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "excluded none-relevant annotations: {}",
        e.excluded_none_relevant
    );
    out
}

/// Category percentages with one column per group.
pub fn format_distribution(d: &CategoryDistribution) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<14}", "category");
    for g in &d.groups {
        let _ = write!(out, "{:>14}", g.name);
    }
    out.push('\n');
    let cats: Vec<_> = crate::java_stmt::StatementCategory::universe(d.funccall_mode).collect();
    for c in cats {
        let _ = write!(out, "{:<14}", c.name());
        for g in &d.groups {
            let f = g.frequencies.get(&c).copied().unwrap_or(0.0);
            let _ = write!(out, "{:>14.1}", 100.0 * f);
        }
        out.push('\n');
    }
    if !d.empty_groups.is_empty() {
        let _ = writeln!(out, "empty groups: {}", d.empty_groups.join(", "));
    }
    out
}
