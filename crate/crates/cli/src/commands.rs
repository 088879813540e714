use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use prisel_core::annotate::{AnnotationService, ServiceConfig, SystemClock};
use prisel_core::corpus::{self, jsonl, Annotation, MethodSample, SplitSpec};
use prisel_core::java_stmt::{extract, MethodCode, Statement};
use prisel_core::metrics::{self, DistributionSource, Grouping, Pairing};
use prisel_core::predictor::{self, AdapterConfig, BaselineConfig, CategoryPrior, Prediction};
use prisel_core::promptgen::{self, TokenBudget};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::provenance::Provenance;

/// One line of statements.jsonl.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementRow {
    pub sample_id: String,
    #[serde(flatten)]
    pub statement: Statement,
}

fn need<'a, T>(value: &'a Option<T>, flag: &str) -> CliResult<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| CliError::validation(format!("missing required --{flag}")))
}

fn check_inputs(paths: &[&Path]) -> CliResult<()> {
    for p in paths {
        if !p.is_file() {
            return Err(CliError::io(format!("{}: no such file", p.display())));
        }
    }
    Ok(())
}

fn check_output(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::io(format!(
            "{}: output directory does not exist",
            dir.display()
        ))),
        _ => Ok(()),
    }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(e.to_string()).context(path.display()))
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn with_provenance(value: &impl Serialize, provenance: &Provenance) -> CliResult<Value> {
    let mut v = serde_json::to_value(value)?;
    v.as_object_mut()
        .expect("reports are objects")
        .insert("provenance".into(), serde_json::to_value(provenance)?);
    Ok(v)
}

fn load_samples(path: &Path) -> CliResult<Vec<MethodSample>> {
    corpus::load_samples(path).map_err(|e| CliError::from(e).context(path.display()))
}

/// Statements for every sample, read from a dump or extracted afresh.
fn load_methods(samples: &[MethodSample], statements: Option<&Path>) -> CliResult<Vec<MethodCode>> {
    let Some(path) = statements else {
        return samples
            .iter()
            .map(|s| extract(&s.id, &s.code).map_err(CliError::from))
            .collect();
    };
    let rows: Vec<(usize, StatementRow)> =
        jsonl::read_records(path).map_err(|e| CliError::from(e).context(path.display()))?;
    let mut grouped: HashMap<String, Vec<Statement>> = HashMap::new();
    for (_, row) in rows {
        grouped
            .entry(row.sample_id)
            .or_default()
            .push(row.statement);
    }
    samples
        .iter()
        .map(|s| {
            let statements = grouped.remove(&s.id).ok_or_else(|| {
                CliError::validation(format!(
                    "{}: no statements for sample `{}`",
                    path.display(),
                    s.id
                ))
            })?;
            Ok(MethodCode {
                sample_id: s.id.clone(),
                source: s.code.clone(),
                statements,
            })
        })
        .collect()
}

fn load_annotations(path: &Path, methods: Option<&[MethodCode]>) -> CliResult<Vec<Annotation>> {
    let counts: Option<HashMap<String, usize>> = methods.map(|ms| {
        ms.iter()
            .map(|m| (m.sample_id.clone(), m.statements.len()))
            .collect()
    });
    corpus::load_annotations(path, counts.as_ref())
        .map_err(|e| CliError::from(e).context(path.display()))
}

fn load_split(path: &Path) -> CliResult<SplitSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(e.to_string()).context(path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(e.to_string()).context(path.display()))
}

/// Ids of the requested subset, or `None` for everything.
fn subset_ids(
    split: Option<&Path>,
    subset: Option<Subset>,
    default: Subset,
) -> CliResult<Option<HashSet<String>>> {
    let Some(path) = split else {
        return match subset {
            None | Some(Subset::All) => Ok(None),
            Some(_) => Err(CliError::validation("--subset needs --split")),
        };
    };
    let spec = load_split(path)?;
    let ids = match subset.unwrap_or(default) {
        Subset::Train => spec.train_ids,
        Subset::Val => spec.val_ids,
        Subset::Test => spec.test_ids,
        Subset::All => return Ok(None),
    };
    Ok(Some(ids.into_iter().collect()))
}

fn keep(ids: &Option<HashSet<String>>, id: &str) -> bool {
    ids.as_ref().is_none_or(|s| s.contains(id))
}

pub fn extract_cmd(a: &ExtractArgs) -> CliResult<()> {
    let samples_path = need(&a.samples, "samples")?;
    let out = need(&a.out, "out")?;
    check_inputs(&[samples_path])?;
    check_output(out)?;
    let samples = load_samples(samples_path)?;
    let methods = load_methods(&samples, None).map_err(|e| e.context(samples_path.display()))?;
    let rows: Vec<StatementRow> = methods
        .into_iter()
        .flat_map(|m| {
            let id = m.sample_id;
            m.statements.into_iter().map(move |statement| StatementRow {
                sample_id: id.clone(),
                statement,
            })
        })
        .collect();
    jsonl::write_records(out, &rows)?;
    println!(
        "{} samples, {} statements -> {}",
        samples.len(),
        rows.len(),
        out.display()
    );
    Ok(())
}

pub fn analyze_cmd(a: &AnalyzeArgs) -> CliResult<()> {
    let samples_path = need(&a.samples, "samples")?;
    let out = need(&a.out, "out")?;
    let mut inputs = vec![samples_path.as_path()];
    inputs.extend(a.statements.as_deref());
    inputs.extend(a.annotations.as_deref());
    check_inputs(&inputs)?;
    check_output(out)?;

    let samples = load_samples(samples_path)?;
    let methods = load_methods(&samples, a.statements.as_deref())?;
    let annotations = match &a.annotations {
        Some(p) => load_annotations(p, Some(&methods))?,
        None => Vec::new(),
    };

    let sources = match a.source {
        Some(s) => vec![s],
        None if a.annotations.is_some() => {
            vec![DistributionSource::Statements, DistributionSource::Ratings]
        }
        None => vec![DistributionSource::Statements],
    };
    if sources.contains(&DistributionSource::Ratings) && a.annotations.is_none() {
        return Err(CliError::validation(
            "ratings distributions need --annotations",
        ));
    }
    let groupings = match a.group {
        Some(g) => vec![g],
        None => vec![Grouping::All, Grouping::ByOrder, Grouping::ByLabel],
    };

    let mut distributions = Vec::new();
    for mode in a.funccall.unwrap_or(ModeChoice::Both).modes() {
        for &source in &sources {
            for &grouping in &groupings {
                let implicit = a.source.is_none() || a.group.is_none();
                if implicit
                    && source == DistributionSource::Statements
                    && grouping == Grouping::ByOrder
                {
                    continue;
                }
                let d = metrics::distribution(
                    &samples,
                    &methods,
                    &annotations,
                    source,
                    grouping,
                    mode,
                )?;
                println!(
                    "{} / {} / func_call {}",
                    serde_json::to_value(source)?.as_str().unwrap_or_default(),
                    serde_json::to_value(grouping)?.as_str().unwrap_or_default(),
                    mode
                );
                println!("{}", metrics::format_distribution(&d));
                distributions.push(d);
            }
        }
    }
    if distributions.is_empty() {
        return Err(CliError::validation(
            "no distribution matches the requested source and grouping",
        ));
    }
    let prov = Provenance::new("analyze", None, a, &inputs)?;
    write_json(
        out,
        &json!({ "distributions": distributions, "provenance": prov }),
    )
}

/// Annotated ids seen by fewer than two distinct annotators.
fn non_test_count(annotations: &[Annotation]) -> usize {
    let mut who: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for a in annotations {
        who.entry(&a.sample_id).or_default().insert(&a.annotator_id);
    }
    who.values().filter(|w| w.len() < 2).count()
}

pub fn split_cmd(a: &SplitArgs) -> CliResult<()> {
    let samples_path = need(&a.samples, "samples")?;
    let ann_path = need(&a.annotations, "annotations")?;
    let out = need(&a.out, "out")?;
    check_inputs(&[samples_path, ann_path])?;
    check_output(out)?;
    let samples = load_samples(samples_path)?;
    let annotations = load_annotations(ann_path, None)?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let val_count = a
        .val_count
        .unwrap_or_else(|| corpus::default_val_count(non_test_count(&annotations)));
    let spec = corpus::make_split(&samples, &annotations, val_count, seed)?;
    println!(
        "train {} / val {} / test {} (seed {seed})",
        spec.train_ids.len(),
        spec.val_ids.len(),
        spec.test_ids.len()
    );
    let prov = Provenance::new("split", Some(seed), a, &[samples_path, ann_path])?;
    write_json(out, &with_provenance(&spec, &prov)?)
}

pub fn prompts_cmd(a: &PromptsArgs) -> CliResult<()> {
    let samples_path = need(&a.samples, "samples")?;
    let ann_path = need(&a.annotations, "annotations")?;
    let out = need(&a.out, "out")?;
    let mut inputs = vec![samples_path.as_path(), ann_path.as_path()];
    inputs.extend(a.statements.as_deref());
    inputs.extend(a.split.as_deref());
    check_inputs(&inputs)?;
    check_output(out)?;
    if let Some(t) = &a.text_out {
        check_output(t)?;
    }

    let samples = load_samples(samples_path)?;
    let methods = load_methods(&samples, a.statements.as_deref())?;
    let annotations = load_annotations(ann_path, Some(&methods))?;
    let ids = subset_ids(a.split.as_deref(), a.subset, Subset::Train)?;
    let chosen: Vec<Annotation> = annotations
        .into_iter()
        .filter(|x| keep(&ids, &x.sample_id))
        .collect();
    let records = promptgen::render_all(&samples, &chosen, &methods)?;
    jsonl::write_records(out, &records)?;
    if let Some(t) = &a.text_out {
        write_text(t, &promptgen::export_plain(&records))?;
    }
    println!("{} prompts -> {}", records.len(), out.display());
    Ok(())
}

pub fn train_cmd(a: &TrainArgs) -> CliResult<()> {
    let samples_path = need(&a.samples, "samples")?;
    let ann_path = need(&a.annotations, "annotations")?;
    let out = need(&a.out, "out")?;
    let mut inputs = vec![samples_path.as_path(), ann_path.as_path()];
    inputs.extend(a.statements.as_deref());
    inputs.extend(a.split.as_deref());
    check_inputs(&inputs)?;
    check_output(out)?;

    let samples = load_samples(samples_path)?;
    let methods = load_methods(&samples, a.statements.as_deref())?;
    let annotations = load_annotations(ann_path, Some(&methods))?;
    let ids = subset_ids(a.split.as_deref(), a.subset, Subset::Train)?;
    let train: Vec<Annotation> = annotations
        .into_iter()
        .filter(|x| keep(&ids, &x.sample_id))
        .collect();
    let defaults = BaselineConfig::default();
    let config = BaselineConfig {
        alpha: a.alpha.unwrap_or(defaults.alpha),
        per_label: a.per_label.unwrap_or(defaults.per_label),
        mode: a.funccall.unwrap_or(defaults.mode),
    };
    let prior = predictor::train_baseline(&train, &samples, &methods, config)?;
    println!(
        "prior from {} annotations -> {}",
        train.len(),
        out.display()
    );
    let prov = Provenance::new("train-baseline", None, a, &inputs)?;
    write_json(out, &with_provenance(&prior, &prov)?)
}

pub fn predict_cmd(a: &PredictArgs) -> CliResult<()> {
    let samples_path = need(&a.samples, "samples")?;
    let out = need(&a.out, "out")?;
    let mut inputs = vec![samples_path.as_path()];
    inputs.extend(a.statements.as_deref());
    inputs.extend(a.split.as_deref());
    inputs.extend(a.prior.as_deref());
    check_inputs(&inputs)?;
    check_output(out)?;

    let samples = load_samples(samples_path)?;
    let methods = load_methods(&samples, a.statements.as_deref())?;
    let ids = subset_ids(a.split.as_deref(), a.subset, Subset::Test)?;
    let chosen: Vec<(&MethodSample, &MethodCode)> = samples
        .iter()
        .zip(&methods)
        .filter(|(s, _)| keep(&ids, &s.id))
        .collect();
    let k = a.k.unwrap_or(3);

    let predictions: Vec<Prediction> = match (&a.prior, &a.adapter) {
        (Some(prior_path), None) => {
            let text = std::fs::read_to_string(prior_path)
                .map_err(|e| CliError::io(e.to_string()).context(prior_path.display()))?;
            let prior: CategoryPrior = serde_json::from_str(&text)
                .map_err(|e| CliError::validation(e.to_string()).context(prior_path.display()))?;
            chosen
                .iter()
                .map(|(s, m)| {
                    Prediction::from_indices(m, &predictor::predict_baseline(m, s.label, &prior, k))
                })
                .collect()
        }
        (None, Some(cmd)) => {
            let command: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
            let mut config = AdapterConfig::new(command);
            if let Some(t) = a.timeout {
                config.timeout_secs = t;
            }
            if let Some(p) = a.max_parallel {
                config.max_parallel = p;
            }
            let budget = TokenBudget::new(
                a.max_tokens.unwrap_or(TokenBudget::default().max_tokens),
                a.token_scheme.unwrap_or_default(),
            )
            .ok_or_else(|| CliError::validation("--max-tokens must be positive"))?;
            let prompts: Vec<String> = chosen
                .iter()
                .map(|(s, _)| promptgen::render_inference(s))
                .collect();
            let completions = predictor::adapter_predict(&prompts, &config)?;
            chosen
                .iter()
                .zip(completions)
                .map(|((_, m), c)| {
                    Prediction::from_texts(m, promptgen::parse_completion(&c, budget))
                })
                .collect()
        }
        _ => {
            return Err(CliError::validation(
                "give exactly one of --prior or --adapter",
            ))
        }
    };
    jsonl::write_records(out, &predictions)?;
    println!("{} predictions -> {}", predictions.len(), out.display());
    Ok(())
}

pub fn evaluate_cmd(a: &EvaluateArgs) -> CliResult<()> {
    let ann_path = need(&a.annotations, "annotations")?;
    let out = need(&a.out, "out")?;
    let human = a.human.unwrap_or(false);
    let mut inputs = vec![ann_path.as_path()];
    if !human {
        inputs.push(need(&a.predictions, "predictions")?);
    }
    inputs.extend(a.split.as_deref());
    check_inputs(&inputs)?;
    check_output(out)?;

    let ids = subset_ids(a.split.as_deref(), a.subset, Subset::Test)?;
    let annotations: Vec<Annotation> = load_annotations(ann_path, None)?
        .into_iter()
        .filter(|x| keep(&ids, &x.sample_id))
        .collect();
    let pairing = a.pairing.unwrap_or_default();
    let evaluation = if human {
        metrics::human_agreement(&annotations)
    } else {
        let pred_path: &PathBuf = need(&a.predictions, "predictions")?;
        let predictions: Vec<Prediction> = jsonl::read(pred_path)
            .map_err(|e| CliError::from(e).context(pred_path.display()))?
            .into_iter()
            .filter(|p: &Prediction| keep(&ids, &p.sample_id))
            .collect();
        metrics::evaluate(&predictions, &annotations, pairing)?
    };
    print!("{}", metrics::format_evaluation(&evaluation));

    let mut report = serde_json::to_value(&evaluation)?;
    let obj = report.as_object_mut().expect("object");
    obj.insert("mode".into(), json!(if human { "human" } else { "model" }));
    obj.insert(
        "pairing".into(),
        json!(if human {
            "first_two_annotators".to_string()
        } else {
            pairing_name(pairing)
        }),
    );
    obj.insert("matching".into(), json!("exact_normalized_text"));
    let prov = Provenance::new("evaluate", None, a, &inputs)?;
    obj.insert("provenance".into(), serde_json::to_value(prov)?);
    write_json(out, &report)
}

fn pairing_name(p: Pairing) -> String {
    serde_json::to_value(p)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn serve_cmd(a: &ServeArgs) -> CliResult<()> {
    let samples_path = need(&a.samples, "samples")?;
    let log = need(&a.annotations, "annotations")?;
    check_inputs(&[samples_path])?;
    check_output(log)?;
    if let Some(dir) = &a.static_dir {
        if !dir.is_dir() {
            return Err(CliError::io(format!("{}: not a directory", dir.display())));
        }
    }
    let samples = load_samples(samples_path)?;
    let defaults = ServiceConfig::default();
    let config = ServiceConfig {
        session_limit_secs: a
            .session_minutes
            .map_or(defaults.session_limit_secs, |m| m * 60),
        seed: a.seed.unwrap_or(DEFAULT_SEED),
        double_quota: a.double_quota.unwrap_or(defaults.double_quota),
    };
    let svc = AnnotationService::new(samples, log, config, Arc::new(SystemClock))?;
    if !svc.skipped().is_empty() {
        eprintln!(
            "skipping {} samples that could not be segmented",
            svc.skipped().len()
        );
    }
    let addr = format!(
        "{}:{}",
        a.host.as_deref().unwrap_or("127.0.0.1"),
        a.port.unwrap_or(8080)
    );
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(crate::server::serve(
        Arc::new(svc),
        a.static_dir.clone(),
        &addr,
    ))?;
    Ok(())
}
