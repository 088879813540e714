//! Input generators shared by the benchmarks under `benches/`.

use prisel_core::corpus::{Annotation, Selection};
use prisel_core::predictor::Prediction;

/// An Android-flavoured method with roughly `n` statements.
pub fn method_source(n: usize) -> String {
    let mut src = String::from("public void collect(Context ctx, Bundle extras) {\n");
    for i in 0..n {
        let line = match i % 6 {
            0 => format!("    String v{i} = prefs.getString(\"key{i}\", null);\n"),
            1 => format!(
                "    if (v{} != null && v{}.length() > {i}) {{\n        log(v{});\n    }}\n",
                i - 1,
                i - 1,
                i - 1
            ),
            2 => format!("    int n{i} = {i} * 2;\n"),
            3 => format!(
                "    for (int j = 0; j < n{}; j++) {{ total += j; }}\n",
                i - 1
            ),
            4 => format!("    tracker.send(new Event(\"e{i}\", ctx.getPackageName()));\n"),
            _ => format!("    counter{i}++;\n"),
        };
        src.push_str(&line);
    }
    src.push_str("    return;\n}\n");
    src
}

/// `n` predictions, each scored against two annotators.
pub fn evaluation_set(n: usize) -> (Vec<Prediction>, Vec<Annotation>) {
    let pick = |seed: usize| -> Vec<usize> {
        let a = seed % 11;
        let b = (seed / 11) % 11;
        let c = (seed / 121) % 11;
        let mut v = vec![a];
        for x in [b, c] {
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v
    };
    let mut predictions = Vec::with_capacity(n);
    let mut annotations = Vec::with_capacity(2 * n);
    for i in 0..n {
        let id = format!("s{i}");
        let p = pick(i * 7919 + 13);
        predictions.push(Prediction {
            sample_id: id.clone(),
            texts: p.iter().map(|x| x.to_string()).collect(),
            indices: p.into_iter().map(Some).collect(),
        });
        for who in 0..2 {
            annotations.push(Annotation {
                sample_id: id.clone(),
                annotator_id: format!("a{who}"),
                none_relevant: false,
                selections: pick(i * 104_729 + who * 31 + 5)
                    .into_iter()
                    .enumerate()
                    .map(|(k, s)| Selection {
                        order: k as u8 + 1,
                        statement_index: s,
                        rationale: None,
                    })
                    .collect(),
            });
        }
    }
    (predictions, annotations)
}
