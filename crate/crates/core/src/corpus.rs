//! Labeled text corpora: loading, class distributions, train/test splits.
//!
//! Corpus file format: UTF-8 text, one record per line, `label<TAB>text`,
//! LF line endings, no header. Blank lines are skipped.

use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed::rng_from;

/// One sentence with its class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledRecord {
    pub label: String,
    pub text: String,
}

impl LabeledRecord {
    /// Validates that the label is non-empty and the text non-blank.
    pub fn new(label: impl Into<String>, text: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let text = text.into();
        if label.trim().is_empty() {
            return Err(Error::invalid("record label is empty"));
        }
        if text.trim().is_empty() {
            return Err(Error::invalid("record text is blank"));
        }
        Ok(Self { label, text })
    }
}

/// An ordered list of records plus the distinct labels in first-appearance
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    records: Vec<LabeledRecord>,
    classes: Vec<String>,
}

impl Dataset {
    pub fn new(records: Vec<LabeledRecord>) -> Self {
        let mut classes: Vec<String> = Vec::new();
        for record in &records {
            if !classes.contains(&record.label) {
                classes.push(record.label.clone());
            }
        }
        Self { records, classes }
    }

    pub fn records(&self) -> &[LabeledRecord] {
        &self.records
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.records.iter().map(|r| r.label.clone()).collect()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.text.as_str()).collect()
    }
}

/// Per-class record counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDistribution {
    counts: IndexMap<String, usize>,
    total: usize,
}

impl ClassDistribution {
    /// Build directly from per-class counts (order preserved).
    pub fn from_counts(counts: IndexMap<String, usize>) -> Self {
        let total = counts.values().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &IndexMap<String, usize> {
        &self.counts
    }

    pub fn count(&self, label: &str) -> usize {
        self.counts.get(label).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Size of the largest class, 0 for an empty distribution.
    pub fn max_count(&self) -> usize {
        self.counts.values().copied().max().unwrap_or(0)
    }
}

/// Load a `label<TAB>text` corpus file.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let Some((label, text)) = line.split_once('\t') else {
            return Err(Error::parse(
                path,
                line_no,
                "malformed line: expected `label<TAB>text`",
            ));
        };
        if label.trim().is_empty() {
            return Err(Error::parse(path, line_no, "empty label"));
        }
        if text.trim().is_empty() {
            return Err(Error::parse(path, line_no, "blank text after label"));
        }
        records.push(LabeledRecord {
            label: label.to_string(),
            text: text.to_string(),
        });
    }
    if records.is_empty() {
        return Err(Error::parse(path, 0, "corpus contains no records"));
    }
    Ok(Dataset::new(records))
}

/// Exact label frequencies over a dataset. Every class of the dataset gets an
/// entry, so totals and orders are stable downstream.
pub fn class_distribution(ds: &Dataset) -> ClassDistribution {
    let mut counts: IndexMap<String, usize> = IndexMap::new();
    for class in ds.classes() {
        counts.insert(class.clone(), 0);
    }
    for record in ds.records() {
        *counts.entry(record.label.clone()).or_insert(0) += 1;
    }
    ClassDistribution::from_counts(counts)
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

fn validate_split_args(ds: &Dataset, test_fraction: f64) -> Result<()> {
    if ds.len() < 2 {
        return Err(Error::invalid("split requires at least 2 records"));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "test fraction {test_fraction} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// Uniform random train/test split.
///
/// The test size is `round-half-up(test_fraction * n)`. Identical seeds give
/// identical partitions.
pub fn split(ds: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    validate_split_args(ds, test_fraction)?;
    let n = ds.len();
    let n_test = round_half_up(test_fraction * n as f64);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from(seed));

    let test: Vec<LabeledRecord> = order[..n_test]
        .iter()
        .map(|&i| ds.records()[i].clone())
        .collect();
    let train: Vec<LabeledRecord> = order[n_test..]
        .iter()
        .map(|&i| ds.records()[i].clone())
        .collect();
    Ok((Dataset::new(train), Dataset::new(test)))
}

/// Stratified variant: the test quota is computed per class with the same
/// rounding rule, so class proportions carry over.
pub fn split_stratified(ds: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    validate_split_args(ds, test_fraction)?;
    let mut rng = rng_from(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in ds.classes() {
        let mut indices: Vec<usize> = ds
            .records()
            .iter()
            .enumerate()
            .filter(|(_, r)| &r.label == class)
            .map(|(i, _)| i)
            .collect();
        indices.shuffle(&mut rng);
        let n_test = round_half_up(test_fraction * indices.len() as f64);
        for &i in &indices[..n_test] {
            test.push(ds.records()[i].clone());
        }
        for &i in &indices[n_test..] {
            train.push(ds.records()[i].clone());
        }
    }
    Ok((Dataset::new(train), Dataset::new(test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn sample(n_a: usize, n_b: usize) -> Dataset {
        let mut records = Vec::new();
        for i in 0..n_a {
            records.push(LabeledRecord::new("A", format!("alpha {i}")).unwrap());
        }
        for i in 0..n_b {
            records.push(LabeledRecord::new("B", format!("beta {i}")).unwrap());
        }
        Dataset::new(records)
    }

    #[test]
    fn load_corpus_parses_tab_separated_lines() {
        let f = write_temp("Birth\tHe was born in 1900.\nDeath\tHe died in 1970.\n");
        let ds = load_corpus(f.path()).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.classes(), &["Birth", "Death"]);
        assert_eq!(ds.records()[0].text, "He was born in 1900.");
    }

    #[test]
    fn load_corpus_skips_blank_lines() {
        let f = write_temp("Birth\ta b\n\n\nDeath\tc d\n");
        let ds = load_corpus(f.path()).unwrap();
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn load_corpus_reports_missing_tab_with_line_number() {
        let f = write_temp("Birth\n");
        let err = load_corpus(f.path()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn load_corpus_rejects_empty_file() {
        let f = write_temp("");
        assert!(load_corpus(f.path()).is_err());
        let blank = write_temp("\n\n");
        assert!(load_corpus(blank.path()).is_err());
    }

    #[test]
    fn class_distribution_counts_exactly() {
        let ds = sample(3, 1);
        let dist = class_distribution(&ds);
        assert_eq!(dist.count("A"), 3);
        assert_eq!(dist.count("B"), 1);
        assert_eq!(dist.total(), 4);
        assert_eq!(dist.max_count(), 3);
    }

    #[test]
    fn class_distribution_of_empty_dataset_is_zero() {
        let dist = class_distribution(&Dataset::new(Vec::new()));
        assert_eq!(dist.total(), 0);
        assert!(dist.counts().is_empty());
    }

    #[test]
    fn class_distribution_covers_single_label() {
        let ds = sample(3, 0);
        let dist = class_distribution(&ds);
        assert_eq!(dist.count("A"), 3);
        assert_eq!(dist.count("unseen"), 0);
    }

    #[test]
    fn split_sizes_follow_round_half_up() {
        let ds = sample(5, 5);
        let (train, test) = split(&ds, 0.2, 42).unwrap();
        assert_eq!(train.len(), 8);
        assert_eq!(test.len(), 2);

        // 1972 records at 0.2: 0.2 * 1972 = 394.4, rounds down to 394.
        let big = sample(1000, 972);
        let (train, test) = split(&big, 0.2, 0).unwrap();
        assert_eq!(test.len(), 394);
        assert_eq!(train.len(), 1578);
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let ds = sample(7, 3);
        let a = split(&ds, 0.2, 42).unwrap();
        let b = split(&ds, 0.2, 42).unwrap();
        assert_eq!(a, b);
        let c = split(&ds, 0.2, 43).unwrap();
        assert_ne!(a, c, "different seed should reshuffle 10 records");
    }

    #[test]
    fn split_partitions_exhaustively() {
        let ds = sample(13, 7);
        let (train, test) = split(&ds, 0.3, 9).unwrap();
        assert_eq!(train.len() + test.len(), ds.len());

        // Multiset equality over (label, text) pairs.
        let mut counts: BTreeMap<(String, String), i64> = BTreeMap::new();
        for r in ds.records() {
            *counts.entry((r.label.clone(), r.text.clone())).or_default() += 1;
        }
        for r in train.records().iter().chain(test.records()) {
            *counts.entry((r.label.clone(), r.text.clone())).or_default() -= 1;
        }
        assert!(counts.values().all(|&v| v == 0));

        let dist_train = class_distribution(&train);
        let dist_test = class_distribution(&test);
        assert_eq!(dist_train.total() + dist_test.total(), ds.len());
    }

    #[test]
    fn split_rejects_tiny_datasets_and_bad_fractions() {
        let ds = sample(1, 0);
        assert!(split(&ds, 0.2, 0).is_err());
        let ds = sample(5, 5);
        assert!(split(&ds, 0.0, 0).is_err());
        assert!(split(&ds, 1.0, 0).is_err());
    }

    #[test]
    fn stratified_split_keeps_per_class_quotas() {
        let ds = sample(10, 5);
        let (train, test) = split_stratified(&ds, 0.2, 1).unwrap();
        let dist = class_distribution(&test);
        assert_eq!(dist.count("A"), 2);
        assert_eq!(dist.count("B"), 1);
        assert_eq!(train.len(), 12);
    }

    #[test]
    fn record_validation_rejects_blank_fields() {
        assert!(LabeledRecord::new("", "text").is_err());
        assert!(LabeledRecord::new("label", "   ").is_err());
    }

    #[test]
    fn bundled_fixture_counts_match_its_manifest() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/corpus.tsv");
        let ds = load_corpus(path).unwrap();
        assert_eq!(ds.len(), 218);
        assert_eq!(ds.classes().len(), 10);
        let dist = class_distribution(&ds);
        // Frozen from `cut -f1 corpus.tsv | sort | uniq -c`.
        let expected = [
            ("Education", 60),
            ("Occupation", 40),
            ("Birth", 26),
            ("Death", 22),
            ("Affiliation", 20),
            ("ProfessionalEvents", 16),
            ("Family", 12),
            ("PersonalEvents", 9),
            ("Parenting", 7),
            ("Residence", 6),
        ];
        for (label, count) in expected {
            assert_eq!(dist.count(label), count, "class {label}");
        }
    }
}
