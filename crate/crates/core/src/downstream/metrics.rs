use super::PredictionRun;
use crate::graph::NodeLabels;

/// Per-label true positives, false positives and false negatives.
fn confusion(run: &PredictionRun, labels: &NodeLabels) -> Vec<(usize, usize, usize)> {
    let mut counts = vec![(0, 0, 0); labels.label_count()];
    for (&u, predicted) in run.test_idx.iter().zip(&run.predictions) {
        let truth = labels.labels_of(u);
        for &p in predicted {
            if truth.contains(&p) {
                counts[p as usize].0 += 1;
            } else {
                counts[p as usize].1 += 1;
            }
        }
        for &t in truth {
            if !predicted.contains(&t) {
                counts[t as usize].2 += 1;
            }
        }
    }
    counts
}

/// `2TP / (2TP + FP + FN)`, 0 when nothing was predicted or present.
pub fn f1_from_counts(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// F1 over counts pooled across all labels.
pub fn micro_f1(run: &PredictionRun, labels: &NodeLabels) -> f64 {
    let (tp, fp, fn_) = confusion(run, labels)
        .into_iter()
        .fold((0, 0, 0), |a, c| (a.0 + c.0, a.1 + c.1, a.2 + c.2));
    f1_from_counts(tp, fp, fn_)
}

/// Unweighted mean of per-label F1 over all labels.
pub fn macro_f1(run: &PredictionRun, labels: &NodeLabels) -> f64 {
    let counts = confusion(run, labels);
    if counts.is_empty() {
        return 0.0;
    }
    counts.iter().map(|&(tp, fp, fn_)| f1_from_counts(tp, fp, fn_)).sum::<f64>() / counts.len() as f64
}
