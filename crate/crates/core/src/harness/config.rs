//! Experiment configuration: a flat `key = value` text file plus the enums
//! naming the grid axes.
//!
//! Unknown keys are rejected so typos surface as config errors. `#` starts a
//! comment; list values are comma-separated.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Resampling method selected by name in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    None,
    Random,
    Smote,
    BorderlineSmote,
    Adasyn,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::None => "none",
            Method::Random => "random",
            Method::Smote => "smote",
            Method::BorderlineSmote => "borderline-smote",
            Method::Adasyn => "adasyn",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "none" => Ok(Method::None),
            "random" => Ok(Method::Random),
            "smote" => Ok(Method::Smote),
            "borderline-smote" => Ok(Method::BorderlineSmote),
            "adasyn" => Ok(Method::Adasyn),
            other => Err(Error::config(format!(
                "unknown method {other:?} (expected none|random|smote|borderline-smote|adasyn)"
            ))),
        }
    }
}

/// Text representation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Bow,
    Tfidf,
    Embedding,
}

impl Representation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Representation::Bow => "bow",
            Representation::Tfidf => "tfidf",
            Representation::Embedding => "embedding",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "bow" => Ok(Representation::Bow),
            "tfidf" => Ok(Representation::Tfidf),
            "embedding" => Ok(Representation::Embedding),
            other => Err(Error::config(format!(
                "unknown representation {other:?} (expected bow|tfidf|embedding)"
            ))),
        }
    }
}

/// Classifier axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierKind {
    Knn,
    Svm,
    Fnn,
}

impl ClassifierKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::Svm => "svm",
            ClassifierKind::Fnn => "fnn",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "knn" => Ok(ClassifierKind::Knn),
            "svm" => Ok(ClassifierKind::Svm),
            "fnn" => Ok(ClassifierKind::Fnn),
            other => Err(Error::config(format!(
                "unknown classifier {other:?} (expected knn|svm|fnn)"
            ))),
        }
    }
}

/// Full description of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub corpus: PathBuf,
    pub embeddings: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub test_fraction: f64,
    pub stratified: bool,
    pub k_percents: Vec<f64>,
    pub methods: Vec<Method>,
    pub representations: Vec<Representation>,
    pub classifiers: Vec<ClassifierKind>,
    /// Duplicate raw records (re-vectorizing afterwards) instead of vectors
    /// for the `random` method.
    pub random_record_level: bool,
    /// Report wall times instead of zeros in the CSV.
    pub include_timings: bool,
    pub knn_k: usize,
    pub resample_k_neighbors: usize,
    pub borderline_m_neighbors: usize,
    pub svm_kernel: crate::models::Kernel,
    pub svm_lambda: f64,
    pub svm_epochs: usize,
    pub fnn_hidden: Vec<usize>,
    pub fnn_epochs: usize,
    pub fnn_learning_rate: f64,
    pub fnn_batch_size: usize,
    pub fnn_dropout: f64,
    pub embedding_mean_pool: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            corpus: PathBuf::new(),
            embeddings: None,
            stopwords: None,
            out_dir: PathBuf::from("out"),
            seed: 0,
            test_fraction: 0.2,
            stratified: false,
            k_percents: vec![0.5, 0.75, 1.0],
            methods: vec![
                Method::None,
                Method::Random,
                Method::Smote,
                Method::BorderlineSmote,
                Method::Adasyn,
            ],
            representations: vec![
                Representation::Bow,
                Representation::Tfidf,
                Representation::Embedding,
            ],
            classifiers: vec![ClassifierKind::Knn, ClassifierKind::Svm, ClassifierKind::Fnn],
            random_record_level: false,
            include_timings: false,
            knn_k: 5,
            resample_k_neighbors: 5,
            borderline_m_neighbors: 5,
            svm_kernel: crate::models::Kernel::Rbf { gamma: 0.001 },
            svm_lambda: 1e-3,
            svm_epochs: 50,
            fnn_hidden: vec![64],
            fnn_epochs: 200,
            fnn_learning_rate: 1e-3,
            fnn_batch_size: 8,
            fnn_dropout: 0.5,
            embedding_mean_pool: false,
        }
    }
}

fn parse_list<T>(value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(parse)
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("key {key:?}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::config(format!("key {key:?}: expected bool, got {other:?}"))),
    }
}

impl ExperimentConfig {
    /// Parse a config file; keys not listed in the README are errors.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = ExperimentConfig::default();
        let mut svm_gamma: Option<f64> = None;
        let mut svm_kernel_name: Option<String> = None;

        for (idx, raw) in content.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    idx + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "corpus" => cfg.corpus = PathBuf::from(value),
                "embeddings" => cfg.embeddings = Some(PathBuf::from(value)),
                "stopwords" => cfg.stopwords = Some(PathBuf::from(value)),
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "seed" => cfg.seed = parse_scalar(key, value)?,
                "test_fraction" => cfg.test_fraction = parse_scalar(key, value)?,
                "stratified" => cfg.stratified = parse_bool(key, value)?,
                "k_percents" => {
                    cfg.k_percents = parse_list(value, |v| parse_scalar::<f64>(key, v))?
                }
                "methods" => cfg.methods = parse_list(value, Method::parse)?,
                "representations" => {
                    cfg.representations = parse_list(value, Representation::parse)?
                }
                "classifiers" => cfg.classifiers = parse_list(value, ClassifierKind::parse)?,
                "random_record_level" => cfg.random_record_level = parse_bool(key, value)?,
                "include_timings" => cfg.include_timings = parse_bool(key, value)?,
                "knn_k" => cfg.knn_k = parse_scalar(key, value)?,
                "resample_k_neighbors" => cfg.resample_k_neighbors = parse_scalar(key, value)?,
                "borderline_m_neighbors" => {
                    cfg.borderline_m_neighbors = parse_scalar(key, value)?
                }
                "svm_kernel" => svm_kernel_name = Some(value.to_string()),
                "svm_gamma" => svm_gamma = Some(parse_scalar(key, value)?),
                "svm_lambda" => cfg.svm_lambda = parse_scalar(key, value)?,
                "svm_epochs" => cfg.svm_epochs = parse_scalar(key, value)?,
                "fnn_hidden" => {
                    cfg.fnn_hidden = parse_list(value, |v| parse_scalar::<usize>(key, v))?
                }
                "fnn_epochs" => cfg.fnn_epochs = parse_scalar(key, value)?,
                "fnn_learning_rate" => cfg.fnn_learning_rate = parse_scalar(key, value)?,
                "fnn_batch_size" => cfg.fnn_batch_size = parse_scalar(key, value)?,
                "fnn_dropout" => cfg.fnn_dropout = parse_scalar(key, value)?,
                "embedding_mean_pool" => cfg.embedding_mean_pool = parse_bool(key, value)?,
                other => {
                    return Err(Error::config(format!(
                        "{}:{}: unknown key {other:?}",
                        path.display(),
                        idx + 1
                    )))
                }
            }
        }

        match (svm_kernel_name.as_deref(), svm_gamma) {
            (Some("linear"), _) => cfg.svm_kernel = crate::models::Kernel::Linear,
            (Some("rbf") | None, gamma) => {
                cfg.svm_kernel = crate::models::Kernel::Rbf {
                    gamma: gamma.unwrap_or(0.001),
                }
            }
            (Some(other), _) => {
                return Err(Error::config(format!(
                    "unknown svm_kernel {other:?} (expected linear|rbf)"
                )))
            }
        }
        Ok(cfg)
    }

    /// Check the fields that must be coherent before a run starts.
    pub fn validate(&self) -> Result<()> {
        if self.corpus.as_os_str().is_empty() {
            return Err(Error::config("missing corpus path"));
        }
        if !self.corpus.exists() {
            return Err(Error::config(format!(
                "corpus file {} does not exist",
                self.corpus.display()
            )));
        }
        if self.representations.contains(&Representation::Embedding) {
            match &self.embeddings {
                None => {
                    return Err(Error::config(
                        "representation `embedding` requires an embeddings path",
                    ))
                }
                Some(p) if !p.exists() => {
                    return Err(Error::config(format!(
                        "embeddings file {} does not exist",
                        p.display()
                    )))
                }
                Some(_) => {}
            }
        }
        if let Some(p) = &self.stopwords {
            if !p.exists() {
                return Err(Error::config(format!(
                    "stopwords file {} does not exist",
                    p.display()
                )));
            }
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::config("test_fraction must lie in (0, 1)"));
        }
        if self.methods.is_empty() || self.representations.is_empty() || self.classifiers.is_empty()
        {
            return Err(Error::config("methods, representations and classifiers must be non-empty"));
        }
        if self.k_percents.is_empty() && self.methods.iter().any(|m| *m != Method::None) {
            return Err(Error::config("k_percents must be non-empty for resampling methods"));
        }
        if self.k_percents.iter().any(|k| !(0.0..=1.0).contains(k)) {
            return Err(Error::config("every k_percent must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_a_full_config() {
        let f = write_temp(
            "# comment\n\
             corpus = data/corpus.tsv\n\
             seed = 9\n\
             k_percents = 0.5, 1.0\n\
             methods = none, smote\n\
             representations = bow\n\
             classifiers = knn, fnn\n\
             svm_kernel = rbf\n\
             svm_gamma = 0.01  # inline comment\n\
             fnn_hidden = 32, 16\n",
        );
        let cfg = ExperimentConfig::from_file(f.path()).unwrap();
        assert_eq!(cfg.corpus, PathBuf::from("data/corpus.tsv"));
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.k_percents, vec![0.5, 1.0]);
        assert_eq!(cfg.methods, vec![Method::None, Method::Smote]);
        assert_eq!(cfg.classifiers, vec![ClassifierKind::Knn, ClassifierKind::Fnn]);
        assert_eq!(cfg.svm_kernel, crate::models::Kernel::Rbf { gamma: 0.01 });
        assert_eq!(cfg.fnn_hidden, vec![32, 16]);
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let f = write_temp("corups = x.tsv\n");
        match ExperimentConfig::from_file(f.path()) {
            Err(Error::Config(msg)) => assert!(msg.contains("corups")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn validate_requires_embeddings_for_embedding_representation() {
        let corpus = write_temp("A\thello\nB\tworld\n");
        let mut cfg = ExperimentConfig {
            corpus: corpus.path().to_path_buf(),
            ..ExperimentConfig::default()
        };
        cfg.representations = vec![Representation::Embedding];
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));

        cfg.representations = vec![Representation::Bow];
        cfg.validate().unwrap();
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::None,
            Method::Random,
            Method::Smote,
            Method::BorderlineSmote,
            Method::Adasyn,
        ] {
            assert_eq!(Method::parse(m.as_str()).unwrap(), m);
        }
        assert!(Method::parse("bogus").is_err());
    }
}
