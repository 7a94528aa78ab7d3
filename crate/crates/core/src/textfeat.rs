//! Text vectorization: Bag-of-Words, TF-IDF and summed word embeddings.
//!
//! The tokenizer is deliberately simple: Unicode letter/digit runs,
//! lowercased. Vocabularies are fit on training text only; applying them to
//! unseen text never grows the index.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::exec;
use crate::matrix::{DenseMatrix, FeatureKind, FeatureMatrix};

/// Split into lowercase runs of Unicode letters/digits. Everything else is a
/// boundary, so hyphens and punctuation separate tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// How token vectors are pooled into one text vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pooling {
    /// Plain sum over token vectors.
    #[default]
    Sum,
    /// Sum divided by the number of tokens found in the table.
    Mean,
}

/// Token-to-column index with document frequencies, fit on training text.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    index: IndexMap<String, usize>,
    document_frequency: Vec<usize>,
    num_documents: usize,
    stopwords: HashSet<String>,
}

impl Vocabulary {
    /// Index every non-stopword token in first-appearance order and count
    /// the documents containing each.
    pub fn build(texts: &[Vec<String>], stopwords: HashSet<String>) -> Result<Self> {
        let mut index: IndexMap<String, usize> = IndexMap::new();
        let mut document_frequency: Vec<usize> = Vec::new();
        for tokens in texts {
            let mut seen_in_doc: HashSet<usize> = HashSet::new();
            for token in tokens {
                if stopwords.contains(token) {
                    continue;
                }
                let col = match index.get(token) {
                    Some(&col) => col,
                    None => {
                        let col = index.len();
                        index.insert(token.clone(), col);
                        document_frequency.push(0);
                        col
                    }
                };
                seen_in_doc.insert(col);
            }
            for col in seen_in_doc {
                document_frequency[col] += 1;
            }
        }
        if index.is_empty() {
            return Err(Error::invalid(
                "vocabulary is empty: no non-stopword tokens in the training texts",
            ));
        }
        Ok(Self {
            index,
            document_frequency,
            num_documents: texts.len(),
            stopwords,
        })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn column(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn document_frequency(&self, column: usize) -> usize {
        self.document_frequency[column]
    }

    pub fn num_documents(&self) -> usize {
        self.num_documents
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    /// Smooth inverse document frequency: `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, column: usize) -> f64 {
        let n = self.num_documents as f64;
        let df = self.document_frequency[column] as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }
}

fn count_row(tokens: &[String], vocab: &Vocabulary) -> Vec<f64> {
    let mut row = vec![0.0; vocab.len()];
    for token in tokens {
        if let Some(col) = vocab.column(token) {
            row[col] += 1.0;
        }
    }
    row
}

/// Raw token counts; tokens outside the vocabulary contribute nothing.
pub fn bow_matrix(
    texts: &[Vec<String>],
    labels: &[String],
    vocab: &Vocabulary,
) -> Result<FeatureMatrix> {
    if vocab.is_empty() {
        return Err(Error::invalid("bow_matrix requires a non-empty vocabulary"));
    }
    let rows = exec::map_indexed(texts.len(), |i| count_row(&texts[i], vocab));
    let x = DenseMatrix::from_rows(&rows)?;
    FeatureMatrix::new(x, labels.to_vec(), FeatureKind::Bow)
}

/// Counts weighted by smooth idf, each row L2-normalized (zero rows stay
/// zero).
pub fn tfidf_matrix(
    texts: &[Vec<String>],
    labels: &[String],
    vocab: &Vocabulary,
) -> Result<FeatureMatrix> {
    if vocab.is_empty() {
        return Err(Error::invalid(
            "tfidf_matrix requires a non-empty vocabulary",
        ));
    }
    let idf: Vec<f64> = (0..vocab.len()).map(|c| vocab.idf(c)).collect();
    let rows = exec::map_indexed(texts.len(), |i| {
        let mut row = count_row(&texts[i], vocab);
        for (value, w) in row.iter_mut().zip(&idf) {
            *value *= w;
        }
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for value in &mut row {
                *value /= norm;
            }
        }
        row
    });
    let x = DenseMatrix::from_rows(&rows)?;
    FeatureMatrix::new(x, labels.to_vec(), FeatureKind::Tfidf)
}

/// Word-to-vector map with a fixed dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    vectors: HashMap<String, Vec<f64>>,
    dimension: usize,
}

impl EmbeddingTable {
    pub fn new(vectors: HashMap<String, Vec<f64>>, dimension: usize) -> Result<Self> {
        for (word, v) in &vectors {
            if v.len() != dimension {
                return Err(Error::invalid(format!(
                    "embedding for {word:?} has {} entries, expected {dimension}",
                    v.len()
                )));
            }
            if !v.iter().all(|x| x.is_finite()) {
                return Err(Error::invalid(format!(
                    "embedding for {word:?} has non-finite entries"
                )));
            }
        }
        Ok(Self { vectors, dimension })
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Parse a word2vec text file: optional `count dim` header, then
/// `word v1 .. v_dim` per line. Duplicate words keep the last entry and log
/// a warning.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut vectors: HashMap<String, Vec<f64>> = HashMap::new();
    let mut dimension: Option<usize> = None;

    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();

        // A first line of exactly two integers is the word2vec header.
        if line_no == 1 && fields.len() == 2 {
            if let (Ok(_count), Ok(dim)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>())
            {
                dimension = Some(dim);
                continue;
            }
        }

        if fields.len() < 2 {
            return Err(Error::parse(
                path,
                line_no,
                "expected `word v1 .. v_dim`",
            ));
        }
        let word = fields[0].to_string();
        let mut vector = Vec::with_capacity(fields.len() - 1);
        for field in &fields[1..] {
            let value: f64 = field.parse().map_err(|_| {
                Error::parse(path, line_no, format!("non-numeric component {field:?}"))
            })?;
            vector.push(value);
        }
        match dimension {
            None => dimension = Some(vector.len()),
            Some(dim) if vector.len() != dim => {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("vector has {} components, expected {dim}", vector.len()),
                ));
            }
            Some(_) => {}
        }
        if vectors.insert(word.clone(), vector).is_some() {
            log::warn!("duplicate embedding for {word:?} at {path:?}:{line_no}; keeping the last");
        }
    }

    let Some(dimension) = dimension else {
        return Err(Error::parse(path, 0, "embedding file contains no vectors"));
    };
    if vectors.is_empty() {
        return Err(Error::parse(path, 0, "embedding file contains no vectors"));
    }
    EmbeddingTable::new(vectors, dimension)
}

/// Sum the embedding vectors of all tokens found in the table; tokens the
/// table does not know are skipped. No token found gives the zero vector.
pub fn embed_text(tokens: &[String], table: &EmbeddingTable) -> Vec<f64> {
    embed_text_pooled(tokens, table, Pooling::Sum)
}

/// [`embed_text`] with an explicit pooling mode.
pub fn embed_text_pooled(tokens: &[String], table: &EmbeddingTable, pooling: Pooling) -> Vec<f64> {
    let mut acc = vec![0.0; table.dimension()];
    let mut found = 0usize;
    for token in tokens {
        if let Some(v) = table.get(token) {
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
            found += 1;
        }
    }
    if pooling == Pooling::Mean && found > 0 {
        for a in &mut acc {
            *a /= found as f64;
        }
    }
    acc
}

/// One pooled embedding row per text.
pub fn embedding_matrix(
    texts: &[Vec<String>],
    labels: &[String],
    table: &EmbeddingTable,
    pooling: Pooling,
) -> Result<FeatureMatrix> {
    if table.is_empty() {
        return Err(Error::invalid(
            "embedding_matrix requires a non-empty table",
        ));
    }
    let rows = exec::map_indexed(texts.len(), |i| embed_text_pooled(&texts[i], table, pooling));
    let x = DenseMatrix::from_rows(&rows)?;
    FeatureMatrix::new(x, labels.to_vec(), FeatureKind::Embedding)
}

/// Stopword file: one token per line, UTF-8; blank lines skipped. Tokens are
/// lowercased to match the tokenizer's output.
pub fn load_stopwords(path: impl AsRef<Path>) -> Result<HashSet<String>> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.to_lowercase())
        .collect())
}
