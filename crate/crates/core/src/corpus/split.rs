use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Annotation, CorpusError, MethodSample};

/// Train/validation/test partition of the annotated sample ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub seed: u64,
    pub train_ids: Vec<String>,
    pub val_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

/// Ten percent of the non-test samples, rounded.
pub fn default_val_count(non_test: usize) -> usize {
    (non_test as f64 * 0.1).round() as usize
}

/// Samples annotated by two or more distinct annotators form the test set; the rest
/// are shuffled with `seed` and the first `val_count` become validation.
///
/// Only samples present in `samples` and carrying at least one annotation take part.
/// Output id lists are sorted.
pub fn make_split(
    samples: &[MethodSample],
    annotations: &[Annotation],
    val_count: usize,
    seed: u64,
) -> Result<SplitSpec, CorpusError> {
    let known: HashSet<&str> = samples.iter().map(|s| s.id.as_str()).collect();
    let mut annotators: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (i, a) in annotations.iter().enumerate() {
        if !known.contains(a.sample_id.as_str()) {
            return Err(CorpusError::UnknownSample {
                line: i + 1,
                sample_id: a.sample_id.clone(),
            });
        }
        annotators
            .entry(a.sample_id.as_str())
            .or_default()
            .insert(a.annotator_id.as_str());
    }

    let mut test = Vec::new();
    let mut single = Vec::new();
    for (&id, who) in &annotators {
        if who.len() >= 2 {
            test.push(id);
        } else {
            single.push(id);
        }
    }

    if val_count >= single.len() {
        return Err(CorpusError::InsufficientSamples {
            available: single.len(),
            requested: val_count,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    single.shuffle(&mut rng);
    let mut val: Vec<String> = single[..val_count].iter().map(|s| s.to_string()).collect();
    let mut train: Vec<String> = single[val_count..].iter().map(|s| s.to_string()).collect();
    val.sort();
    train.sort();

    Ok(SplitSpec {
        seed,
        train_ids: train,
        val_ids: val,
        test_ids: test.into_iter().map(str::to_string).collect(),
    })
}
