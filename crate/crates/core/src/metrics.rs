//! Confusion matrices and macro-averaged evaluation metrics.
//!
//! Macro means run over the full fixed class order, including classes with
//! zero support, so comparisons across resamplers use a constant
//! denominator. Any 0/0 precision, recall or F1 is defined as 0.

use indexmap::IndexMap;

use crate::error::{Error, Result};

/// Square count matrix indexed (true class, predicted class) over a fixed
/// class order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
    class_order: Vec<String>,
}

impl ConfusionMatrix {
    pub fn class_order(&self) -> &[String] {
        &self.class_order
    }

    pub fn count(&self, true_class: usize, predicted_class: usize) -> u64 {
        self.counts[true_class][predicted_class]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Build directly from counts; rows are true classes.
    pub fn from_counts(counts: Vec<Vec<u64>>, class_order: Vec<String>) -> Result<Self> {
        if counts.len() != class_order.len()
            || counts.iter().any(|row| row.len() != class_order.len())
        {
            return Err(Error::invalid("confusion counts must be square over the class order"));
        }
        Ok(Self {
            counts,
            class_order,
        })
    }
}

/// Count (true, predicted) pairs over a fixed class order.
pub fn confusion(
    true_labels: &[String],
    predicted_labels: &[String],
    class_order: &[String],
) -> Result<ConfusionMatrix> {
    if true_labels.len() != predicted_labels.len() {
        return Err(Error::invalid(format!(
            "{} true labels vs {} predictions",
            true_labels.len(),
            predicted_labels.len()
        )));
    }
    let position: IndexMap<&str, usize> = class_order
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let k = class_order.len();
    let mut counts = vec![vec![0u64; k]; k];
    for (t, p) in true_labels.iter().zip(predicted_labels) {
        let ti = *position
            .get(t.as_str())
            .ok_or_else(|| Error::invalid(format!("unknown true label {t:?}")))?;
        let pi = *position
            .get(p.as_str())
            .ok_or_else(|| Error::invalid(format!("unknown predicted label {p:?}")))?;
        counts[ti][pi] += 1;
    }
    ConfusionMatrix::from_counts(counts, class_order.to_vec())
}

/// Precision, recall, F1 and support for one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Accuracy plus macro-averaged precision/recall/F1 with the per-class
/// breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_class: IndexMap<String, ClassMetrics>,
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Derive the metric report from a confusion matrix.
pub fn report(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let k = cm.class_order().len();
    let total = cm.total();
    if total == 0 {
        return Err(Error::invalid("cannot report metrics over zero samples"));
    }

    let mut per_class = IndexMap::new();
    let mut trace = 0u64;
    for c in 0..k {
        let tp = cm.count(c, c);
        trace += tp;
        let row_sum: u64 = (0..k).map(|j| cm.count(c, j)).sum();
        let col_sum: u64 = (0..k).map(|i| cm.count(i, c)).sum();
        let precision = ratio_or_zero(tp as f64, col_sum as f64);
        let recall = ratio_or_zero(tp as f64, row_sum as f64);
        let f1 = ratio_or_zero(2.0 * precision * recall, precision + recall);
        per_class.insert(
            cm.class_order()[c].clone(),
            ClassMetrics {
                precision,
                recall,
                f1,
                support: row_sum,
            },
        );
    }

    let mean = |f: fn(&ClassMetrics) -> f64| -> f64 {
        per_class.values().map(f).sum::<f64>() / k as f64
    };
    Ok(MetricsReport {
        accuracy: trace as f64 / total as f64,
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        per_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn strs(labels: &[&str]) -> Vec<String> {
        labels.iter().map(|l| l.to_string()).collect()
    }

    #[test]
    fn perfect_predictions_give_diagonal_matrix_and_unit_metrics() {
        let order = strs(&["A", "B", "C"]);
        let labels = strs(&["A", "B", "C", "A"]);
        let cm = confusion(&labels, &labels, &order).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(cm.count(i, j), 0);
                }
            }
        }
        let rep = report(&cm).unwrap();
        assert_eq!(rep.accuracy, 1.0);
        assert_eq!(rep.macro_precision, 1.0);
        assert_eq!(rep.macro_recall, 1.0);
        assert_eq!(rep.macro_f1, 1.0);
    }

    #[test]
    fn constant_predictor_fills_one_column() {
        let order = strs(&["A", "B"]);
        let truth = strs(&["A", "B", "B"]);
        let preds = strs(&["A", "A", "A"]);
        let cm = confusion(&truth, &preds, &order).unwrap();
        assert_eq!(cm.count(0, 0), 1);
        assert_eq!(cm.count(1, 0), 2);
        assert_eq!(cm.count(0, 1), 0);
        assert_eq!(cm.count(1, 1), 0);
    }

    #[test]
    fn three_sample_counting_example() {
        let order = strs(&["A", "B"]);
        let truth = strs(&["A", "A", "B"]);
        let preds = strs(&["A", "B", "B"]);
        let cm = confusion(&truth, &preds, &order).unwrap();
        assert_eq!(cm.count(0, 0), 1);
        assert_eq!(cm.count(0, 1), 1);
        assert_eq!(cm.count(1, 0), 0);
        assert_eq!(cm.count(1, 1), 1);
    }

    #[test]
    fn hand_derived_report_for_the_two_class_fixture() {
        // counts [[1,1],[0,1]]: A has P=1, R=1/2, F1=2/3; B has P=1/2, R=1,
        // F1=2/3; accuracy 2/3.
        let cm =
            ConfusionMatrix::from_counts(vec![vec![1, 1], vec![0, 1]], strs(&["A", "B"])).unwrap();
        let rep = report(&cm).unwrap();
        assert_abs_diff_eq!(rep.accuracy, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.macro_f1, 2.0 / 3.0, epsilon = 1e-12);
        let a = rep.per_class["A"];
        assert_abs_diff_eq!(a.precision, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.recall, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(a.f1, 2.0 / 3.0, epsilon = 1e-12);
        let b = rep.per_class["B"];
        assert_abs_diff_eq!(b.precision, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.recall, 1.0, epsilon = 1e-12);
        assert_eq!(a.support, 2);
        assert_eq!(b.support, 1);
    }

    #[test]
    fn absent_class_counts_as_zero_in_the_macro_mean() {
        // Class C never true and never predicted: its P = R = F1 = 0 and it
        // still divides the macro mean.
        let order = strs(&["A", "B", "C"]);
        let truth = strs(&["A", "B"]);
        let preds = strs(&["A", "B"]);
        let rep = report(&confusion(&truth, &preds, &order).unwrap()).unwrap();
        assert_abs_diff_eq!(rep.macro_f1, 2.0 / 3.0, epsilon = 1e-12);
        assert_eq!(rep.per_class["C"].f1, 0.0);
        assert_eq!(rep.per_class["C"].support, 0);
        assert_eq!(rep.accuracy, 1.0);
    }

    #[test]
    fn unknown_labels_and_length_mismatch_error() {
        let order = strs(&["A"]);
        assert!(confusion(&strs(&["B"]), &strs(&["A"]), &order).is_err());
        assert!(confusion(&strs(&["A"]), &strs(&["B"]), &order).is_err());
        assert!(confusion(&strs(&["A", "A"]), &strs(&["A"]), &order).is_err());
    }

    #[test]
    fn empty_matrix_is_rejected() {
        let cm = ConfusionMatrix::from_counts(vec![vec![0]], strs(&["A"])).unwrap();
        assert!(report(&cm).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn permuting_samples_leaves_metrics_unchanged(seed in 0u64..500, n in 1usize..40) {
            use rand::seq::SliceRandom;
            use rand::Rng;
            let mut rng = crate::seed::rng_from(seed);
            let order = strs(&["A", "B", "C"]);
            let truth: Vec<String> = (0..n)
                .map(|_| order[rng.random_range(0..3)].clone())
                .collect();
            let preds: Vec<String> = (0..n)
                .map(|_| order[rng.random_range(0..3)].clone())
                .collect();

            let rep = report(&confusion(&truth, &preds, &order).unwrap()).unwrap();

            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let truth_p: Vec<String> = perm.iter().map(|&i| truth[i].clone()).collect();
            let preds_p: Vec<String> = perm.iter().map(|&i| preds[i].clone()).collect();
            let rep_p = report(&confusion(&truth_p, &preds_p, &order).unwrap()).unwrap();

            prop_assert_eq!(rep, rep_p);
        }

        #[test]
        fn metrics_stay_in_unit_interval(seed in 0u64..500, n in 1usize..40) {
            use rand::Rng;
            let mut rng = crate::seed::rng_from(seed);
            let order = strs(&["A", "B", "C", "D"]);
            let truth: Vec<String> = (0..n)
                .map(|_| order[rng.random_range(0..4)].clone())
                .collect();
            let preds: Vec<String> = (0..n)
                .map(|_| order[rng.random_range(0..4)].clone())
                .collect();
            let rep = report(&confusion(&truth, &preds, &order).unwrap()).unwrap();

            for v in [rep.accuracy, rep.macro_precision, rep.macro_recall, rep.macro_f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            // Macro F1 is the mean of per-class F1, not the F1 of means.
            let mean_f1: f64 = rep.per_class.values().map(|m| m.f1).sum::<f64>() / 4.0;
            prop_assert!((rep.macro_f1 - mean_f1).abs() < 1e-12);
        }
    }
}
