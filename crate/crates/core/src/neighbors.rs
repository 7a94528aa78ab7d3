//! Exact brute-force k-nearest-neighbor queries over dense vectors.
//!
//! Shared by the resamplers and the KNN classifier. Distances are Euclidean
//! and ties break on the smaller row index, so every consumer is
//! reproducible. No tree or approximate structure: at this scale O(n^2) is
//! fine and exactness stays testable.

use crate::error::{Error, Result};
use crate::exec;
use crate::matrix::DenseMatrix;

/// Euclidean distance between two equal-length vectors.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Immutable point set queried for nearest neighbors.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    points: DenseMatrix,
    labels: Option<Vec<usize>>,
}

/// Query result: row indices with their distances, sorted by
/// (distance, index) ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

impl NeighborIndex {
    pub fn new(points: DenseMatrix) -> Result<Self> {
        if points.rows() == 0 {
            return Err(Error::invalid("neighbor index needs at least one point"));
        }
        if !points.all_finite() {
            return Err(Error::invalid("neighbor index points must be finite"));
        }
        Ok(Self {
            points,
            labels: None,
        })
    }

    /// Attach a parallel class-id array (used by the KNN classifier).
    pub fn with_labels(points: DenseMatrix, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != points.rows() {
            return Err(Error::invalid(format!(
                "{} labels for {} points",
                labels.len(),
                points.rows()
            )));
        }
        let mut index = Self::new(points)?;
        index.labels = Some(labels);
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn points(&self) -> &DenseMatrix {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// The `k` rows closest to `query` by Euclidean distance, ties broken by
    /// smaller row index. `exclude` removes one row (the query's own row when
    /// querying from inside the index).
    pub fn query(&self, query: &[f64], k: usize, exclude: Option<usize>) -> Result<NeighborList> {
        if query.len() != self.dim() {
            return Err(Error::invalid(format!(
                "query has dimension {}, index has {}",
                query.len(),
                self.dim()
            )));
        }
        let available = self.len() - usize::from(exclude.map_or(false, |e| e < self.len()));
        if k == 0 || k > available {
            return Err(Error::invalid(format!(
                "k={k} out of range for {available} candidate rows"
            )));
        }

        // Compare on squared distance; sqrt only for the reported values.
        let mut candidates: Vec<(f64, usize)> = (0..self.len())
            .filter(|&i| Some(i) != exclude)
            .map(|i| (squared_distance(query, self.points.row(i)), i))
            .collect();
        candidates.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        candidates.truncate(k);

        Ok(NeighborList {
            indices: candidates.iter().map(|&(_, i)| i).collect(),
            distances: candidates.iter().map(|&(d, _)| d.sqrt()).collect(),
        })
    }

    /// One query per row of `queries`; rows are independent, so this runs on
    /// the execution helper (rayon when the `parallel` feature is on).
    pub fn query_batch(&self, queries: &DenseMatrix, k: usize) -> Result<Vec<NeighborList>> {
        let results = exec::map_indexed(queries.rows(), |i| self.query(queries.row(i), k, None));
        results.into_iter().collect()
    }

    /// Sequential twin of [`query_batch`]; used by the benchmark suite to
    /// compare against the parallel path.
    pub fn query_batch_seq(&self, queries: &DenseMatrix, k: usize) -> Result<Vec<NeighborList>> {
        let results =
            exec::map_indexed_seq(queries.rows(), |i| self.query(queries.row(i), k, None));
        results.into_iter().collect()
    }
}
