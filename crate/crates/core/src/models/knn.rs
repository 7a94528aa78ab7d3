//! k-nearest-neighbor classifier: a lazy learner over the exact brute-force
//! neighbor index.

use crate::error::{Error, Result};
use crate::exec;
use crate::matrix::{DenseMatrix, FeatureMatrix};
use crate::models::{class_ids, Predictions};
use crate::neighbors::NeighborIndex;

/// Majority vote among the k nearest stored rows; vote ties go to the class
/// of the nearest neighbor among the tied classes.
#[derive(Debug, Clone)]
pub struct KnnClassifier {
    index: NeighborIndex,
    k: usize,
    class_order: Vec<String>,
}

impl KnnClassifier {
    /// Store the training data verbatim. `k` must not exceed the row count.
    pub fn fit(fm: &FeatureMatrix, k: usize) -> Result<Self> {
        if fm.is_empty() {
            return Err(Error::invalid("knn needs at least one training row"));
        }
        if k == 0 || k > fm.len() {
            return Err(Error::invalid(format!(
                "k={k} out of range for {} training rows",
                fm.len()
            )));
        }
        let (class_order, ids) = class_ids(fm);
        Ok(Self {
            index: NeighborIndex::with_labels(fm.features().clone(), ids)?,
            k,
            class_order,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn training_rows(&self) -> &DenseMatrix {
        self.index.points()
    }

    pub fn predict(&self, queries: &DenseMatrix) -> Result<Predictions> {
        if queries.cols() != self.index.dim() {
            return Err(Error::invalid(format!(
                "queries have dimension {}, model expects {}",
                queries.cols(),
                self.index.dim()
            )));
        }
        let labels = self.index.labels().expect("index built with labels");
        let n_classes = self.class_order.len();

        let per_query: Vec<(usize, Vec<f64>)> = exec::map_indexed(queries.rows(), |q| {
            let list = self
                .index
                .query(queries.row(q), self.k, None)
                .expect("validated dims and k");
            let mut votes = vec![0usize; n_classes];
            for &i in &list.indices {
                votes[labels[i]] += 1;
            }
            let top = *votes.iter().max().unwrap();
            // Nearest neighbor belonging to a top-voted class decides ties.
            let winner = list
                .indices
                .iter()
                .map(|&i| labels[i])
                .find(|&c| votes[c] == top)
                .unwrap();
            let fractions = votes.iter().map(|&v| v as f64 / self.k as f64).collect();
            (winner, fractions)
        });

        let mut scores = DenseMatrix::zeros(queries.rows(), n_classes);
        let mut predicted = Vec::with_capacity(queries.rows());
        for (q, (winner, fractions)) in per_query.into_iter().enumerate() {
            predicted.push(self.class_order[winner].clone());
            scores.row_mut(q).copy_from_slice(&fractions);
        }
        Ok(Predictions {
            labels: predicted,
            scores: Some(scores),
            class_order: self.class_order.clone(),
        })
    }
}
