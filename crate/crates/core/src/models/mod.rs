//! From-scratch classifiers over feature matrices: k-nearest-neighbor,
//! one-vs-rest kernel SVM trained by stochastic subgradient descent, and a
//! feedforward softmax network trained with Adam.
//!
//! Fitted models are immutable; prediction is a pure function of the model
//! and the queries, parallelized over query rows.

mod fnn;
mod knn;
mod svm;

pub use fnn::{FnnClassifier, FnnParams};
pub use knn::KnnClassifier;
pub use svm::{Kernel, SvmClassifier, SvmParams};

use crate::matrix::{DenseMatrix, FeatureMatrix};

/// Per-sample predicted labels with optional per-class scores.
///
/// `scores`, when present, has one row per query and one column per entry of
/// `class_order`.
#[derive(Debug, Clone)]
pub struct Predictions {
    pub labels: Vec<String>,
    pub scores: Option<DenseMatrix>,
    pub class_order: Vec<String>,
}

/// Map string labels onto dense class ids in first-appearance order.
pub(crate) fn class_ids(fm: &FeatureMatrix) -> (Vec<String>, Vec<usize>) {
    let class_order = fm.class_order();
    let ids = fm
        .labels()
        .iter()
        .map(|label| class_order.iter().position(|c| c == label).unwrap())
        .collect();
    (class_order, ids)
}

/// First class index attaining the strictly largest score (ties keep the
/// earlier class).
pub(crate) fn argmax_tie_first(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::FeatureKind;

    #[test]
    fn argmax_prefers_first_on_ties() {
        assert_eq!(argmax_tie_first(&[0.5, 0.5, 0.5]), 0);
        assert_eq!(argmax_tie_first(&[0.1, 0.7, 0.7]), 1);
        assert_eq!(argmax_tie_first(&[0.1, 0.2, 0.9]), 2);
    }

    #[test]
    fn class_ids_follow_first_appearance() {
        let fm = FeatureMatrix::new(
            DenseMatrix::zeros(3, 1),
            vec!["b".into(), "a".into(), "b".into()],
            FeatureKind::Synthetic,
        )
        .unwrap();
        let (order, ids) = class_ids(&fm);
        assert_eq!(order, vec!["b", "a"]);
        assert_eq!(ids, vec![0, 1, 0]);
    }
}
