//! Synthetic Gaussian-blob fixtures: a desk-scale stand-in for corpora that
//! cannot be bundled, plus the matrix/corpus interchange writers.

use std::fs;
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, FeatureKind, FeatureMatrix};
use crate::seed::{mix, rng_from};

/// One Gaussian class blob.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSpec {
    pub label: String,
    pub count: usize,
    pub mean: Vec<f64>,
}

/// Blob layout: per-class counts and means, one isotropic standard
/// deviation, a dimension and a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub dimension: usize,
    pub std: f64,
    pub seed: u64,
    pub classes: Vec<ClassSpec>,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        if !(self.std > 0.0) {
            return Err(Error::config("std must be positive"));
        }
        if self.classes.is_empty() {
            return Err(Error::config("at least one class is required"));
        }
        for class in &self.classes {
            if class.count == 0 {
                return Err(Error::config(format!("class {:?} needs count >= 1", class.label)));
            }
            if class.mean.len() != self.dimension {
                return Err(Error::config(format!(
                    "class {:?} mean has {} components, dimension is {}",
                    class.label,
                    class.mean.len(),
                    self.dimension
                )));
            }
        }
        let mut labels: Vec<&str> = self.classes.iter().map(|c| c.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != self.classes.len() {
            return Err(Error::config("class labels must be distinct"));
        }
        Ok(())
    }
}

/// Draw the blobs. Classes are generated from per-class sub-seeds, so counts
/// are exact and output is identical for a given seed.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<FeatureMatrix> {
    spec.validate()?;
    let mut x = DenseMatrix::zeros(0, 0);
    let mut labels = Vec::new();
    for (pos, class) in spec.classes.iter().enumerate() {
        let mut rng = rng_from(mix(spec.seed, pos as u64));
        for _ in 0..class.count {
            let row: Vec<f64> = class
                .mean
                .iter()
                .map(|&m| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    m + spec.std * z
                })
                .collect();
            x.push_row(&row)?;
            labels.push(class.label.clone());
        }
    }
    FeatureMatrix::new(x, labels, FeatureKind::Synthetic)
}

/// Parse a blob spec file: flat `key = value` lines with one repeated
/// `class = label, count, m1, m2, ...` key per class.
pub fn parse_spec(path: impl AsRef<Path>) -> Result<SyntheticSpec> {
    let path = path.as_ref();
    let content = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    let mut dimension = None;
    let mut std = None;
    let mut seed = 0u64;
    let mut classes = Vec::new();

    for (idx, raw) in content.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::config(format!("{}:{}: {msg}", path.display(), idx + 1));
        let Some((key, value)) = line.split_once('=') else {
            return Err(err("expected `key = value`".into()));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "dimension" => {
                dimension = Some(value.parse().map_err(|_| err(format!("bad dimension {value:?}")))?)
            }
            "std" => std = Some(value.parse().map_err(|_| err(format!("bad std {value:?}")))?),
            "seed" => seed = value.parse().map_err(|_| err(format!("bad seed {value:?}")))?,
            "class" => {
                let fields: Vec<&str> = value.split(',').map(str::trim).collect();
                if fields.len() < 3 {
                    return Err(err("class needs `label, count, m1, ...`".into()));
                }
                let count = fields[1]
                    .parse()
                    .map_err(|_| err(format!("bad count {:?}", fields[1])))?;
                let mean = fields[2..]
                    .iter()
                    .map(|f| f.parse().map_err(|_| err(format!("bad mean component {f:?}"))))
                    .collect::<Result<Vec<f64>>>()?;
                classes.push(ClassSpec {
                    label: fields[0].to_string(),
                    count,
                    mean,
                });
            }
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }

    let spec = SyntheticSpec {
        dimension: dimension.ok_or_else(|| Error::config("spec is missing `dimension`"))?,
        std: std.ok_or_else(|| Error::config("spec is missing `std`"))?,
        seed,
        classes,
    };
    spec.validate()?;
    Ok(spec)
}

/// Matrix interchange file: CSV, one row per sample, label in the first
/// column, full-precision feature values after it.
pub fn write_matrix_csv(fm: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for (i, label) in fm.labels().iter().enumerate() {
        out.push_str(label);
        for v in fm.features().row(i) {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read the matrix interchange format back.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label = fields
            .next()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| Error::parse(path, idx + 1, "missing label"))?;
        let row = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::parse(path, idx + 1, format!("bad value {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        labels.push(label.to_string());
        rows.push(row);
    }
    FeatureMatrix::new(DenseMatrix::from_rows(&rows)?, labels, FeatureKind::Synthetic)
}

/// Render each sample as a pseudo-sentence so blob specs can exercise the
/// text pipeline: one token per feature, `f<dim>p<bucket>` for bucket >= 0
/// and `f<dim>n<bucket>` below zero, bucket = value rounded to the nearest
/// integer. Tokens are pure letter/digit runs, so the tokenizer keeps them
/// whole.
pub fn write_corpus_tsv(fm: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for (i, label) in fm.labels().iter().enumerate() {
        out.push_str(label);
        out.push('\t');
        for (j, v) in fm.features().row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let bucket = v.round() as i64;
            if bucket < 0 {
                out.push_str(&format!("f{j}n{}", -bucket));
            } else {
                out.push_str(&format!("f{j}p{bucket}"));
            }
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use indexmap::IndexMap;
    use std::io::Write;

    fn two_blob_spec(seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            dimension: 2,
            std: 0.5,
            seed,
            classes: vec![
                ClassSpec {
                    label: "A".into(),
                    count: 100,
                    mean: vec![0.0, 0.0],
                },
                ClassSpec {
                    label: "B".into(),
                    count: 5,
                    mean: vec![3.0, 3.0],
                },
            ],
        }
    }

    #[test]
    fn counts_are_exact_and_output_reproducible() {
        let spec = two_blob_spec(7);
        let fm = generate_synthetic(&spec).unwrap();
        assert_eq!(fm.len(), 105);
        let counts = fm.class_indices();
        assert_eq!(counts["A"].len(), 100);
        assert_eq!(counts["B"].len(), 5);
        assert_eq!(fm, generate_synthetic(&spec).unwrap());
        assert_ne!(fm, generate_synthetic(&two_blob_spec(8)).unwrap());
    }

    #[test]
    fn empirical_means_track_spec_means() {
        // Pool the samples of 20 fixed seeds per class; the pooled mean of
        // each coordinate must land within 3 * std / sqrt(pooled n).
        let template = two_blob_spec(0);
        let mut sums: IndexMap<String, Vec<f64>> = IndexMap::new();
        let mut counts: IndexMap<String, usize> = IndexMap::new();
        for seed in 0..20u64 {
            let spec = SyntheticSpec { seed, ..template.clone() };
            let fm = generate_synthetic(&spec).unwrap();
            for (label, rows) in fm.class_indices() {
                let acc = sums
                    .entry(label.clone())
                    .or_insert_with(|| vec![0.0; spec.dimension]);
                for &r in &rows {
                    for (a, v) in acc.iter_mut().zip(fm.features().row(r)) {
                        *a += v;
                    }
                }
                *counts.entry(label).or_insert(0) += rows.len();
            }
        }
        for class in &template.classes {
            let n = counts[&class.label] as f64;
            let tolerance = 3.0 * template.std / n.sqrt();
            for j in 0..template.dimension {
                let mean = sums[&class.label][j] / n;
                assert!(
                    (mean - class.mean[j]).abs() <= tolerance,
                    "class {} dim {j}: pooled mean {mean} vs {}",
                    class.label,
                    class.mean[j]
                );
            }
        }
    }

    #[test]
    fn spec_file_round_trip() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(
            b"# blobs\ndimension = 2\nstd = 0.5\nseed = 7\nclass = A, 100, 0.0, 0.0\nclass = B, 5, 3.0, 3.0\n",
        )
        .unwrap();
        let spec = parse_spec(f.path()).unwrap();
        assert_eq!(spec, two_blob_spec(7));
    }

    #[test]
    fn spec_validation_catches_bad_fields() {
        let mut spec = two_blob_spec(0);
        spec.classes[0].mean = vec![0.0];
        assert!(spec.validate().is_err());

        let mut spec = two_blob_spec(0);
        spec.std = 0.0;
        assert!(spec.validate().is_err());

        let mut spec = two_blob_spec(0);
        spec.classes[1].label = "A".into();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn matrix_csv_round_trips() {
        let fm = generate_synthetic(&two_blob_spec(3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_matrix_csv(&fm, &path).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(back.labels(), fm.labels());
        for i in 0..fm.len() {
            for j in 0..fm.dim() {
                assert_eq!(back.features().get(i, j), fm.features().get(i, j));
            }
        }
    }

    #[test]
    fn corpus_rendering_produces_loadable_tokens() {
        let fm = generate_synthetic(&two_blob_spec(4)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.tsv");
        write_corpus_tsv(&fm, &path).unwrap();
        let ds = crate::corpus::load_corpus(&path).unwrap();
        assert_eq!(ds.len(), 105);
        let tokens = crate::textfeat::tokenize(&ds.records()[0].text);
        assert_eq!(tokens.len(), 2, "one token per dimension");
        assert!(tokens[0].starts_with("f0"));
    }
}
