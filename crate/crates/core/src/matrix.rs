//! Dense row-major matrix and the labeled feature matrix built on it.

use indexmap::IndexMap;

use crate::error::{Error, Result};

/// Dense `f64` matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Build from a flat row-major buffer; `data.len()` must be `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix buffer has {} entries, expected {}x{}={}",
                data.len(),
                rows,
                cols,
                rows * cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from per-row slices; all rows must share one width.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::invalid(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    cols
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1))
    }

    /// Append a row; width must match unless the matrix is still 0 x 0.
    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if self.rows == 0 && self.cols == 0 {
            self.cols = row.len();
        }
        if row.len() != self.cols {
            return Err(Error::invalid(format!(
                "appended row has {} entries, expected {}",
                row.len(),
                self.cols
            )));
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// What a feature matrix's columns mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    /// Raw token counts over a fixed vocabulary.
    Bow,
    /// Token counts reweighted by inverse document frequency, L2-normalized.
    Tfidf,
    /// Summed word-embedding vectors.
    Embedding,
    /// Numeric vectors not derived from text (e.g. generated blobs).
    Synthetic,
}

impl FeatureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureKind::Bow => "bow",
            FeatureKind::Tfidf => "tfidf",
            FeatureKind::Embedding => "embedding",
            FeatureKind::Synthetic => "synthetic",
        }
    }
}

/// Vectorized samples with a parallel label array.
///
/// The unit every resampler and classifier consumes: one row per sample, one
/// label per row, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    x: DenseMatrix,
    labels: Vec<String>,
    kind: FeatureKind,
}

impl FeatureMatrix {
    pub fn new(x: DenseMatrix, labels: Vec<String>, kind: FeatureKind) -> Result<Self> {
        if x.rows() != labels.len() {
            return Err(Error::invalid(format!(
                "matrix has {} rows but {} labels",
                x.rows(),
                labels.len()
            )));
        }
        if !x.all_finite() {
            return Err(Error::invalid("feature matrix contains non-finite entries"));
        }
        Ok(Self { x, labels, kind })
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.x.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    /// Distinct labels in first-appearance order.
    pub fn class_order(&self) -> Vec<String> {
        let mut seen = IndexMap::new();
        for label in &self.labels {
            seen.entry(label.clone()).or_insert(());
        }
        seen.into_keys().collect()
    }

    /// Row indices per label, keyed in first-appearance order.
    pub fn class_indices(&self) -> IndexMap<String, Vec<usize>> {
        let mut map: IndexMap<String, Vec<usize>> = IndexMap::new();
        for (i, label) in self.labels.iter().enumerate() {
            map.entry(label.clone()).or_default().push(i);
        }
        map
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_rejects_ragged_input() {
        let err = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]);
        assert!(err.is_err());
    }

    #[test]
    fn push_row_extends_and_checks_width() {
        let mut m = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        m.push_row(&[3.0, 4.0]).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.row(1), &[3.0, 4.0]);
        assert!(m.push_row(&[5.0]).is_err());
    }

    #[test]
    fn feature_matrix_rejects_label_mismatch_and_non_finite() {
        let x = DenseMatrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(FeatureMatrix::new(x.clone(), vec!["a".into()], FeatureKind::Bow).is_err());

        let bad = DenseMatrix::from_rows(&[vec![f64::NAN]]).unwrap();
        assert!(FeatureMatrix::new(bad, vec!["a".into()], FeatureKind::Bow).is_err());
    }

    #[test]
    fn class_order_is_first_appearance() {
        let x = DenseMatrix::zeros(4, 1);
        let fm = FeatureMatrix::new(
            x,
            vec!["b".into(), "a".into(), "b".into(), "c".into()],
            FeatureKind::Synthetic,
        )
        .unwrap();
        assert_eq!(fm.class_order(), vec!["b", "a", "c"]);
        assert_eq!(fm.class_indices()["b"], vec![0, 2]);
    }
}
