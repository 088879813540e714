//! Acceptance suite. Runs as a plain binary and prints one line per criterion.
//!
//! `PRISEL_RELEASED_DATA` may point at an annotations.jsonl holding the released
//! doubly-annotated test set; without it the human-agreement criterion is skipped.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::fixtures::load_labeled_methods;
use prisel_core::corpus::{
    load_annotations, make_split, Annotation, MethodSample, PrivacyLabel, Selection,
};
use prisel_core::java_stmt::{extract, FuncCallPrecedence, MethodCode, StatementCategory};
use prisel_core::metrics::{
    distribution, human_agreement, overlap_any_order, overlap_in_order, DistributionSource,
    Grouping, OverlapHistogram,
};
use prisel_core::predictor::{
    adapter_predict, predict_baseline, predict_with, train_baseline, AdapterConfig, AdapterError,
    BaselineConfig, PositionScorer, Prediction,
};
use prisel_core::promptgen::{parse_completion, render_training, TokenBudget};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Allowed deviation, in percentage points, for the synthetic distribution cells.
const DISTRIBUTION_TOL_PP: f64 = 1.0;
/// Allowed deviation of a group's frequency sum from 1.
const GROUP_SUM_TOL: f64 = 1e-9;
/// Allowed deviation of a histogram's percentage sum from 100.
const HISTOGRAM_SUM_TOL: f64 = 1e-6;
/// Allowed deviation, in percentage points, for the human-agreement columns.
const HUMAN_TOL_PP: f64 = 0.05;

const FUZZ_PAIRS: usize = 10_000;
const DISTRIBUTION_SELECTIONS: usize = 10_000;
const PROMPT_TRIALS: usize = 1_000;
const SCALE_TRIALS: usize = 100;

enum Outcome {
    Pass,
    Fail(String),
    Skip(String),
}

type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn outcome(r: Result<(), String>) -> Outcome {
    match r {
        Ok(()) => Outcome::Pass,
        Err(e) => Outcome::Fail(e),
    }
}

fn some(v: &[usize]) -> Vec<Option<usize>> {
    v.iter().copied().map(Some).collect()
}

fn annotation(sample_id: &str, who: &str, indices: &[usize]) -> Annotation {
    Annotation {
        sample_id: sample_id.into(),
        annotator_id: who.into(),
        none_relevant: indices.is_empty(),
        selections: indices
            .iter()
            .enumerate()
            .map(|(i, &s)| Selection {
                order: i as u8 + 1,
                statement_index: s,
                rationale: None,
            })
            .collect(),
    }
}

fn sample(id: &str, code: &str, label: PrivacyLabel) -> MethodSample {
    MethodSample {
        id: id.into(),
        code: code.into(),
        label,
        project: None,
    }
}

/// Name, prediction, reference, expected (any-order, in-order).
type OverlapCase<'a> = (&'a str, &'a [usize], &'a [usize], (usize, usize));

fn overlap_oracle() -> Outcome {
    let a = [3, 7, 12];
    let b = [1, 6, 12];
    let jam = [6, 10, 12];
    let gpt = [0, 12, 13];
    let codellama = [12, 5, 6];
    let cases: [OverlapCase; 8] = [
        ("worked", &[3, 4, 5], &[2, 3, 4], (2, 0)),
        ("A-B", &a, &b, (1, 1)),
        ("jam-A", &jam, &a, (1, 1)),
        ("jam-B", &jam, &b, (2, 1)),
        ("gpt-A", &gpt, &a, (1, 0)),
        ("gpt-B", &gpt, &b, (1, 0)),
        ("codellama-A", &codellama, &a, (1, 0)),
        ("codellama-B", &codellama, &b, (2, 0)),
    ];
    outcome(cases.iter().try_for_each(|(name, pred, reference, want)| {
        let got = (
            overlap_any_order(&some(pred), reference),
            overlap_in_order(&some(pred), reference),
        );
        ensure(got == *want, || {
            format!("{name}: got {got:?}, want {want:?}")
        })
    }))
}

fn random_indices(rng: &mut ChaCha8Rng, len: usize, range: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..range).collect();
    pool.shuffle(rng);
    pool.truncate(len);
    pool
}

fn permutations(v: &[Option<usize>]) -> Vec<Vec<Option<usize>>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

fn metric_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut any_levels = Vec::with_capacity(FUZZ_PAIRS);
    let mut in_levels = Vec::with_capacity(FUZZ_PAIRS);
    let result = (0..FUZZ_PAIRS).try_for_each(|i| {
        let pred_len = rng.random_range(0..=3);
        let pred: Vec<Option<usize>> = random_indices(&mut rng, pred_len, 8)
            .into_iter()
            .map(|x| (!rng.random_bool(0.15)).then_some(x))
            .collect();
        let ref_len = rng.random_range(1..=3);
        let reference = random_indices(&mut rng, ref_len, 8);
        let any = overlap_any_order(&pred, &reference);
        let ord = overlap_in_order(&pred, &reference);
        ensure(ord <= any && any <= 3, || {
            format!("pair {i}: in {ord} any {any}")
        })?;
        for p in permutations(&pred) {
            let permuted = overlap_any_order(&p, &reference);
            ensure(permuted == any, || {
                format!("pair {i}: permutation changed {any} to {permuted}")
            })?;
        }
        any_levels.push(any);
        in_levels.push(ord);
        Ok(())
    });
    if let Err(e) = result {
        return Outcome::Fail(e);
    }
    let mut hists = vec![
        OverlapHistogram::from_levels(any_levels.iter().copied()),
        OverlapHistogram::from_levels(in_levels.iter().copied()),
    ];
    for n in [1, 3, 7, 259, 2426] {
        hists.push(OverlapHistogram::from_levels(
            any_levels.iter().copied().take(n),
        ));
    }
    outcome(hists.iter().try_for_each(|h| {
        let sum: f64 = h.percentages.iter().sum();
        ensure((sum - 100.0).abs() <= HISTOGRAM_SUM_TOL, || {
            format!("percentages sum to {sum}")
        })
    }))
}

fn categorizer_oracle() -> Outcome {
    let methods = load_labeled_methods();
    if methods.len() != 30 {
        return Outcome::Fail(format!("fixture has {} methods", methods.len()));
    }
    outcome(methods.iter().try_for_each(|m| {
        let code = extract(&m.id, &m.source).map_err(|e| format!("{}: {e}", m.id))?;
        ensure(code.statements.len() == m.expected.len(), || {
            format!(
                "{}: {} statements, want {}",
                m.id,
                code.statements.len(),
                m.expected.len()
            )
        })?;
        for (s, e) in code.statements.iter().zip(&m.expected) {
            ensure(s.normalized_text == e.text, || {
                format!("{}: text `{}`", m.id, s.normalized_text)
            })?;
            ensure(s.category == e.on && s.category_no_call == e.off, || {
                format!(
                    "{}: `{}` got {}/{}",
                    m.id, e.text, s.category, s.category_no_call
                )
            })?;
            ensure(s.category_no_call != StatementCategory::FuncCall, || {
                format!("{}: func_call with precedence off", m.id)
            })?;
        }
        Ok(())
    }))
}

/// Three statements each of the four tabled categories plus `throw` for the remainder.
const DISTRIBUTION_METHOD: &str = "void f(int a) {
  a = 1;
  a = 2;
  a = 3;
  int b = 1;
  int c = 2;
  int d = 3;
  if (a > 0) {
  }
  if (a > 1) {
  }
  if (a > 2) {
  }
  return;
  return;
  return;
  throw e1;
  throw e2;
  throw e3;
}";

const TABLED: [(StatementCategory, [f64; 3]); 4] = [
    (StatementCategory::ExprStmt, [49.1, 49.1, 51.5]),
    (StatementCategory::DeclStmt, [27.7, 19.5, 15.0]),
    (StatementCategory::IfStmt, [17.3, 25.0, 19.8]),
    (StatementCategory::Return, [3.8, 2.6, 8.7]),
];

/// Categories for one order column, drawn to the tabled shares by largest remainder.
fn quota_column(rng: &mut ChaCha8Rng, order: usize, n: usize) -> Vec<StatementCategory> {
    let mut cats: Vec<(StatementCategory, f64)> =
        TABLED.iter().map(|(c, p)| (*c, p[order])).collect();
    let rest = 100.0 - cats.iter().map(|c| c.1).sum::<f64>();
    cats.push((StatementCategory::Throw, rest));
    let exact: Vec<f64> = cats.iter().map(|c| c.1 / 100.0 * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut by_remainder: Vec<usize> = (0..cats.len()).collect();
    by_remainder
        .sort_by(|&i, &j| (exact[j] - exact[j].floor()).total_cmp(&(exact[i] - exact[i].floor())));
    let short = n - counts.iter().sum::<usize>();
    for &i in by_remainder.iter().take(short) {
        counts[i] += 1;
    }
    let mut out: Vec<StatementCategory> = cats
        .iter()
        .zip(&counts)
        .flat_map(|((c, _), &k)| std::iter::repeat_n(*c, k))
        .collect();
    out.shuffle(rng);
    out
}

fn distribution_oracle() -> Outcome {
    let template = match extract("t", DISTRIBUTION_METHOD) {
        Ok(m) => m,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let mut slots: BTreeMap<StatementCategory, Vec<usize>> = BTreeMap::new();
    for s in &template.statements {
        slots.entry(s.category_no_call).or_default().push(s.index);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let columns: Vec<Vec<StatementCategory>> = (0..3)
        .map(|o| quota_column(&mut rng, o, DISTRIBUTION_SELECTIONS))
        .collect();

    let labels = PrivacyLabel::ALL;
    let mut samples = Vec::with_capacity(DISTRIBUTION_SELECTIONS);
    let mut methods = Vec::with_capacity(DISTRIBUTION_SELECTIONS);
    let mut annotations = Vec::with_capacity(DISTRIBUTION_SELECTIONS);
    for i in 0..DISTRIBUTION_SELECTIONS {
        let id = format!("d{i}");
        samples.push(sample(&id, DISTRIBUTION_METHOD, labels[i % labels.len()]));
        methods.push(MethodCode {
            sample_id: id.clone(),
            ..template.clone()
        });
        let mut used: BTreeMap<StatementCategory, usize> = BTreeMap::new();
        let picks: Vec<usize> = columns
            .iter()
            .map(|col| {
                let cat = col[i];
                let k = used.entry(cat).or_default();
                *k += 1;
                slots[&cat][*k - 1]
            })
            .collect();
        annotations.push(annotation(&id, "synthetic", &picks));
    }

    let d = match distribution(
        &samples,
        &methods,
        &annotations,
        DistributionSource::Ratings,
        Grouping::ByOrder,
        FuncCallPrecedence::Off,
    ) {
        Ok(d) => d,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let names = ["first", "second", "third"];
    outcome((|| {
        for (cat, pcts) in TABLED {
            for (o, want) in pcts.iter().enumerate() {
                let got = d.percent(names[o], cat).unwrap_or(f64::NAN);
                ensure((got - want).abs() <= DISTRIBUTION_TOL_PP, || {
                    format!("{cat} {}: {got:.3} vs {want}", names[o])
                })?;
            }
        }
        for g in &d.groups {
            let sum: f64 = g.frequencies.values().sum();
            ensure((sum - 1.0).abs() <= GROUP_SUM_TOL, || {
                format!("group {} sums to {sum}", g.name)
            })?;
        }
        ensure(d.groups.len() == 3, || format!("{} groups", d.groups.len()))
    })())
}

fn split_protocol() -> Outcome {
    const N: usize = 2426;
    const DOUBLES: usize = 259;
    let code = "void f() {\n  a();\n}";
    let samples: Vec<MethodSample> = (0..N)
        .map(|i| sample(&format!("s{i:05}"), code, PrivacyLabel::ALL[i % 4]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let doubled: BTreeSet<String> = random_indices(&mut rng, DOUBLES, N)
        .into_iter()
        .map(|i| format!("s{i:05}"))
        .collect();
    let mut annotations = Vec::new();
    for s in &samples {
        annotations.push(annotation(&s.id, "p1", &[1]));
        if doubled.contains(&s.id) {
            annotations.push(annotation(&s.id, "p2", &[1]));
        }
    }
    annotations.shuffle(&mut rng);

    let run = |seed| make_split(&samples, &annotations, 216, seed).map_err(|e| e.to_string());
    outcome((|| {
        let first = run(42)?;
        let again = run(42)?;
        let sizes = (
            first.train_ids.len(),
            first.val_ids.len(),
            first.test_ids.len(),
        );
        ensure(sizes == (1951, 216, 259), || format!("sizes {sizes:?}"))?;
        let test: BTreeSet<String> = first.test_ids.iter().cloned().collect();
        ensure(test == doubled, || {
            "test set differs from the doubly-annotated ids".into()
        })?;
        ensure(first == again, || "same seed gave different splits".into())?;
        let other = run(43)?;
        ensure(other.test_ids == first.test_ids, || {
            "test set depends on the seed".into()
        })
    })())
}

fn prompt_round_trip() -> Outcome {
    let fixtures = load_labeled_methods();
    let methods: Vec<MethodCode> =
        match fixtures.iter().map(|m| extract(&m.id, &m.source)).collect() {
            Ok(m) => m,
            Err(e) => return Outcome::Fail(e.to_string()),
        };
    let budget = TokenBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = (0..PROMPT_TRIALS).try_for_each(|t| {
        let i = rng.random_range(0..fixtures.len());
        let method = &methods[i];
        let k = rng.random_range(1..=3.min(method.statements.len()));
        let picks = random_indices(&mut rng, k, method.statements.len());
        let label = PrivacyLabel::ALL[rng.random_range(0..4)];
        let s = sample(&fixtures[i].id, &fixtures[i].source, label);
        let rec = render_training(&s, &annotation(&s.id, "a", &picks), method)
            .map_err(|e| format!("trial {t}: {e}"))?;
        let completion = rec
            .training_text
            .strip_prefix(&rec.inference_prefix)
            .ok_or_else(|| format!("trial {t}: prefix mismatch"))?;
        let got = parse_completion(completion, budget);
        let want: Vec<String> = picks
            .iter()
            .map(|&p| {
                method.statements[p]
                    .text
                    .replace('\t', " ")
                    .trim()
                    .to_string()
            })
            .collect();
        ensure(got == want, || format!("trial {t}: {got:?} vs {want:?}"))
    });
    if let Err(e) = trials {
        return Outcome::Fail(e);
    }

    let words: Vec<String> = (0..400).map(|i| format!("w{i}")).collect();
    let long = format!("{}\t{}", words[..200].join(" "), words[200..].join(" "));
    let got = parse_completion(&long, budget);
    let expected = vec![words[..200].join(" "), words[200..256].join(" ")];
    let tokens: usize = got.iter().map(|s| s.split_whitespace().count()).sum();
    outcome(ensure(
        got == expected && tokens == budget.max_tokens,
        || format!("truncated to {tokens} tokens"),
    ))
}

struct Scaled<'a> {
    inner: &'a dyn PositionScorer,
    factors: [f64; 3],
}

impl PositionScorer for Scaled<'_> {
    fn score(&self, category: StatementCategory, position: usize, label: PrivacyLabel) -> f64 {
        self.inner.score(category, position, label) * self.factors[position]
    }
}

/// Scores 1 for a single category per position, 0 otherwise.
struct Concentrated([StatementCategory; 3]);

impl PositionScorer for Concentrated {
    fn score(&self, category: StatementCategory, position: usize, _: PrivacyLabel) -> f64 {
        if self.0[position] == category {
            1.0
        } else {
            0.0
        }
    }
}

/// The earliest unchosen statement of the wanted category, else the earliest unchosen one.
fn brute_force_concentrated(
    method: &MethodCode,
    wanted: [StatementCategory; 3],
    mode: FuncCallPrecedence,
) -> Vec<usize> {
    let mut order: Vec<&_> = method.statements.iter().collect();
    order.sort_by_key(|s| (s.line_start, s.index));
    let mut chosen = Vec::new();
    for cat in wanted.iter().take(method.statements.len()) {
        let free = || order.iter().filter(|s| !chosen.contains(&s.index));
        let pick = free()
            .find(|s| s.category_for(mode) == *cat)
            .or_else(|| free().next())
            .map(|s| s.index);
        chosen.extend(pick);
    }
    chosen
}

fn baseline_invariance() -> Outcome {
    let fixtures = load_labeled_methods();
    let methods: Vec<MethodCode> =
        match fixtures.iter().map(|m| extract(&m.id, &m.source)).collect() {
            Ok(m) => m,
            Err(e) => return Outcome::Fail(e.to_string()),
        };
    let samples: Vec<MethodSample> = fixtures
        .iter()
        .enumerate()
        .map(|(i, f)| sample(&f.id, &f.source, PrivacyLabel::ALL[i % 4]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let annotations: Vec<Annotation> = methods
        .iter()
        .map(|m| {
            let k = 3.min(m.statements.len());
            annotation(
                &m.sample_id,
                "a",
                &random_indices(&mut rng, k, m.statements.len()),
            )
        })
        .collect();
    let config = BaselineConfig {
        per_label: true,
        ..BaselineConfig::default()
    };

    let run = || -> Result<String, String> {
        let prior =
            train_baseline(&annotations, &samples, &methods, config).map_err(|e| e.to_string())?;
        let preds: Vec<Prediction> = methods
            .iter()
            .zip(&samples)
            .map(|(m, s)| Prediction::from_indices(m, &predict_baseline(m, s.label, &prior, 3)))
            .collect();
        serde_json::to_string(&(prior, preds)).map_err(|e| e.to_string())
    };
    outcome((|| {
        let (first, second) = (run()?, run()?);
        ensure(first.as_bytes() == second.as_bytes(), || {
            "predictions differ between runs".into()
        })?;

        let prior =
            train_baseline(&annotations, &samples, &methods, config).map_err(|e| e.to_string())?;
        for t in 0..SCALE_TRIALS {
            let factors = [0; 3].map(|_| 10f64.powf(rng.random_range(-3.0..3.0)));
            let scaled = Scaled {
                inner: &prior,
                factors,
            };
            let i = rng.random_range(0..methods.len());
            let (m, label) = (&methods[i], samples[i].label);
            let base = predict_baseline(m, label, &prior, 3);
            let got = predict_with(&scaled, m, label, prior.mode, 3);
            ensure(base == got, || {
                format!("trial {t}: {base:?} vs {got:?} under {factors:?}")
            })?;
        }

        let universe: Vec<StatementCategory> =
            StatementCategory::universe(FuncCallPrecedence::On).collect();
        for t in 0..SCALE_TRIALS {
            let wanted = [0; 3].map(|_| universe[rng.random_range(0..universe.len())]);
            let m = &methods[rng.random_range(0..methods.len())];
            let got = predict_with(
                &Concentrated(wanted),
                m,
                PrivacyLabel::Other,
                FuncCallPrecedence::On,
                3,
            );
            let want = brute_force_concentrated(m, wanted, FuncCallPrecedence::On);
            ensure(got == want, || {
                format!("concentrated trial {t}: {got:?} vs {want:?}")
            })?;
        }
        Ok(())
    })())
}

fn mock(args: &[&str], timeout_secs: f64, max_parallel: usize) -> AdapterConfig {
    let mut command = vec![env!("CARGO_BIN_EXE_prisel-mock-adapter").to_string()];
    command.extend(args.iter().map(|s| s.to_string()));
    AdapterConfig {
        command,
        timeout_secs,
        max_parallel,
    }
}

fn adapter_protocol() -> Outcome {
    let prompts: Vec<String> = (0..12)
        .map(|i| {
            format!("CODE:\tvoid f{i}() {{}}\nLABEL:\tOther\nSTATEMENT:<s>stmt{i};\tnext{i}();</s>")
        })
        .collect();
    outcome((|| {
        let echoed =
            adapter_predict(&prompts, &mock(&["echo"], 10.0, 4)).map_err(|e| e.to_string())?;
        ensure(echoed == prompts, || "echo mismatch".into())?;
        let parsed = parse_completion(
            echoed[3].split_once("<s>").unwrap().1,
            TokenBudget::default(),
        );
        ensure(parsed == ["stmt3;", "next3();"], || {
            format!("parsed {parsed:?}")
        })?;

        let shuffled =
            adapter_predict(&prompts, &mock(&["shuffle"], 10.0, 4)).map_err(|e| e.to_string())?;
        ensure(shuffled == prompts, || {
            "out-of-order responses were not reassembled".into()
        })?;

        match adapter_predict(&prompts, &mock(&["malformed"], 10.0, 1)) {
            Err(AdapterError::Protocol(_)) => {}
            other => return Err(format!("malformed: {other:?}")),
        }
        let started = Instant::now();
        match adapter_predict(&prompts[..1], &mock(&["hang"], 0.5, 1)) {
            Err(AdapterError::Timeout(_)) => {}
            other => return Err(format!("hang: {other:?}")),
        }
        ensure(started.elapsed() < Duration::from_secs(5), || {
            "timeout took too long".into()
        })
    })())
}

const HUMAN_ANY: [f64; 4] = [27.80, 30.89, 35.91, 5.41];
const HUMAN_IN: [f64; 4] = [72.97, 16.22, 6.18, 4.63];

fn human_column() -> Outcome {
    let Ok(path) = std::env::var("PRISEL_RELEASED_DATA") else {
        return Outcome::Skip("PRISEL_RELEASED_DATA not set".into());
    };
    let annotations = match load_annotations(&path, None) {
        Ok(a) => a,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let ev = human_agreement(&annotations);
    let Some(h) = ev.histograms.get("human") else {
        return Outcome::Fail("no doubly-annotated samples".into());
    };
    outcome((|| {
        for (name, got, want) in [
            ("any-order", h.any_order.percentages, HUMAN_ANY),
            ("in-order", h.in_order.percentages, HUMAN_IN),
        ] {
            for level in 0..4 {
                ensure((got[level] - want[level]).abs() <= HUMAN_TOL_PP, || {
                    format!("{name} level {level}: {:.2} vs {}", got[level], want[level])
                })?;
            }
        }
        Ok(())
    })())
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 9] = [
        ("overlap-oracle", overlap_oracle, Duration::from_secs(1)),
        (
            "metric-properties",
            metric_properties,
            Duration::from_secs(10),
        ),
        (
            "categorizer-oracle",
            categorizer_oracle,
            Duration::from_secs(1),
        ),
        (
            "distribution-oracle",
            distribution_oracle,
            Duration::from_secs(5),
        ),
        ("split-protocol", split_protocol, Duration::from_secs(1)),
        (
            "prompt-round-trip",
            prompt_round_trip,
            Duration::from_secs(5),
        ),
        (
            "baseline-determinism-invariance",
            baseline_invariance,
            Duration::from_secs(5),
        ),
        (
            "adapter-protocol",
            adapter_protocol,
            Duration::from_secs(10),
        ),
        (
            "human-agreement-released-data",
            human_column,
            Duration::from_secs(30),
        ),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let started = Instant::now();
        let result = check();
        let took = started.elapsed();
        let result = match result {
            Outcome::Pass if took > budget => Outcome::Fail(format!("over budget {budget:?}")),
            r => r,
        };
        match result {
            Outcome::Pass => println!("PASS {name} ({took:.2?})"),
            Outcome::Skip(why) => println!("SKIP {name}: {why}"),
            Outcome::Fail(why) => {
                failed += 1;
                println!("FAIL {name} ({took:.2?}): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
