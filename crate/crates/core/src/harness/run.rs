//! Experiment grid execution.
//!
//! One cell per (method, representation, classifier, k). The corpus is
//! split once per run; vocabularies, idf statistics and resampling are all
//! computed on the training split only, and the test set is never
//! resampled. Cells are independent, own their derived seeds, and may run
//! in parallel; output is sorted afterwards, so scheduling cannot leak into
//! the report.

use std::collections::HashSet;
use std::time::Instant;

use indexmap::IndexMap;

use crate::corpus::{class_distribution, load_corpus, split, split_stratified, Dataset};
use crate::error::{Error, Result};
use crate::exec;
use crate::harness::config::{ClassifierKind, ExperimentConfig, Method, Representation};
use crate::matrix::{DenseMatrix, FeatureMatrix};
use crate::metrics::{confusion, report, MetricsReport};
use crate::models::{FnnClassifier, FnnParams, KnnClassifier, Predictions, SvmClassifier, SvmParams};
use crate::resample;
use crate::seed::{mix, stable_hash};
use crate::textfeat::{
    bow_matrix, embedding_matrix, load_embeddings, load_stopwords, tfidf_matrix, tokenize,
    EmbeddingTable, Pooling, Vocabulary,
};

/// One grid coordinate with its result.
#[derive(Debug, Clone)]
pub struct ExperimentCell {
    pub method: Method,
    pub representation: Representation,
    pub classifier: ClassifierKind,
    /// `None` for the baseline (method `none`), which ignores k.
    pub k_percent: Option<f64>,
    pub seed: u64,
    pub result: MetricsReport,
    pub wall_time_ms: f64,
}

/// Seed for one cell: a stable hash of the master seed and the coordinate,
/// so adding grid points never perturbs existing cells.
pub fn cell_seed(
    master: u64,
    method: Method,
    representation: Representation,
    classifier: ClassifierKind,
    k_percent: Option<f64>,
) -> u64 {
    let k_str = match k_percent {
        Some(k) => k.to_string(),
        None => "none".to_string(),
    };
    stable_hash(&[
        &master.to_string(),
        method.as_str(),
        representation.as_str(),
        classifier.as_str(),
        &k_str,
    ])
}

struct RepArtifacts {
    train: FeatureMatrix,
    test: DenseMatrix,
}

struct RunContext {
    cfg: ExperimentConfig,
    train_ds: Dataset,
    test_labels: Vec<String>,
    test_tokens: Vec<Vec<String>>,
    class_order: Vec<String>,
    stopwords: HashSet<String>,
    embeddings: Option<EmbeddingTable>,
    reps: IndexMap<Representation, RepArtifacts>,
}

fn pooling(cfg: &ExperimentConfig) -> Pooling {
    if cfg.embedding_mean_pool {
        Pooling::Mean
    } else {
        Pooling::Sum
    }
}

fn vectorize(
    representation: Representation,
    train_tokens: &[Vec<String>],
    train_labels: &[String],
    test_tokens: &[Vec<String>],
    test_labels: &[String],
    stopwords: &HashSet<String>,
    embeddings: Option<&EmbeddingTable>,
    pool: Pooling,
) -> Result<RepArtifacts> {
    let (train, test) = match representation {
        Representation::Bow => {
            let vocab = Vocabulary::build(train_tokens, stopwords.clone())?;
            (
                bow_matrix(train_tokens, train_labels, &vocab)?,
                bow_matrix(test_tokens, test_labels, &vocab)?,
            )
        }
        Representation::Tfidf => {
            let vocab = Vocabulary::build(train_tokens, stopwords.clone())?;
            (
                tfidf_matrix(train_tokens, train_labels, &vocab)?,
                tfidf_matrix(test_tokens, test_labels, &vocab)?,
            )
        }
        Representation::Embedding => {
            let table = embeddings.ok_or_else(|| {
                Error::config("representation `embedding` requires an embeddings path")
            })?;
            (
                embedding_matrix(train_tokens, train_labels, table, pool)?,
                embedding_matrix(test_tokens, test_labels, table, pool)?,
            )
        }
    };
    Ok(RepArtifacts {
        test: test.features().clone(),
        train,
    })
}

fn fit_predict(
    cfg: &ExperimentConfig,
    classifier: ClassifierKind,
    train: &FeatureMatrix,
    test: &DenseMatrix,
    model_seed: u64,
) -> Result<Predictions> {
    match classifier {
        ClassifierKind::Knn => KnnClassifier::fit(train, cfg.knn_k)?.predict(test),
        ClassifierKind::Svm => {
            let params = SvmParams {
                kernel: cfg.svm_kernel,
                lambda: cfg.svm_lambda,
                epochs: cfg.svm_epochs,
                seed: model_seed,
                record_objective: false,
            };
            SvmClassifier::fit(train, &params)?.predict(test)
        }
        ClassifierKind::Fnn => {
            let params = FnnParams {
                hidden: cfg.fnn_hidden.clone(),
                epochs: cfg.fnn_epochs,
                learning_rate: cfg.fnn_learning_rate,
                batch_size: cfg.fnn_batch_size,
                dropout: cfg.fnn_dropout,
                seed: model_seed,
            };
            FnnClassifier::fit(train, &params)?.predict(test)
        }
    }
}

fn resample_train(
    ctx: &RunContext,
    method: Method,
    representation: Representation,
    k_percent: f64,
    resample_seed: u64,
) -> Result<(FeatureMatrix, DenseMatrix)> {
    let artifacts = &ctx.reps[&representation];
    let plan = resample::target_sizes(&class_distribution(&ctx.train_ds), k_percent)?;

    if method == Method::Random && ctx.cfg.random_record_level {
        // Duplicate raw records, then re-vectorize. Bag and tf-idf refit
        // their statistics on the duplicated training records; the test
        // split is untouched either way.
        let duplicated = resample::random_oversample_records(&ctx.train_ds, &plan, resample_seed)?;
        let dup_tokens: Vec<Vec<String>> =
            duplicated.records().iter().map(|r| tokenize(&r.text)).collect();
        let artifacts = vectorize(
            representation,
            &dup_tokens,
            &duplicated.labels(),
            &ctx.test_tokens,
            &ctx.test_labels,
            &ctx.stopwords,
            ctx.embeddings.as_ref(),
            pooling(&ctx.cfg),
        )?;
        return Ok((artifacts.train, artifacts.test));
    }

    let k = ctx.cfg.resample_k_neighbors;
    let oversampled = match method {
        Method::None => unreachable!("baseline skips resampling"),
        Method::Random => resample::random_oversample(&artifacts.train, &plan, resample_seed)?,
        Method::Smote => resample::smote(&artifacts.train, &plan, k, resample_seed)?,
        Method::BorderlineSmote => resample::borderline_smote(
            &artifacts.train,
            &plan,
            ctx.cfg.borderline_m_neighbors,
            k,
            resample_seed,
        )?,
        Method::Adasyn => resample::adasyn(&artifacts.train, &plan, k, resample_seed)?,
    };
    Ok((oversampled.matrix, artifacts.test.clone()))
}

fn run_cell(
    ctx: &RunContext,
    method: Method,
    representation: Representation,
    classifier: ClassifierKind,
    k_percent: Option<f64>,
) -> Result<ExperimentCell> {
    let started = Instant::now();
    let seed = cell_seed(ctx.cfg.seed, method, representation, classifier, k_percent);
    let resample_seed = mix(seed, 1);
    let model_seed = mix(seed, 2);

    let (train, test) = match k_percent {
        None => {
            let artifacts = &ctx.reps[&representation];
            (artifacts.train.clone(), artifacts.test.clone())
        }
        Some(k) => resample_train(ctx, method, representation, k, resample_seed)?,
    };

    let predictions = fit_predict(&ctx.cfg, classifier, &train, &test, model_seed)?;
    let cm = confusion(&ctx.test_labels, &predictions.labels, &ctx.class_order)?;
    let result = report(&cm)?;

    Ok(ExperimentCell {
        method,
        representation,
        classifier,
        k_percent,
        seed,
        result,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Sort key used for reports: (k, method, representation, classifier), with
/// baseline cells (k absent, written as 0) first.
pub fn sort_cells(cells: &mut [ExperimentCell]) {
    cells.sort_by(|a, b| {
        let ka = a.k_percent.unwrap_or(0.0);
        let kb = b.k_percent.unwrap_or(0.0);
        ka.total_cmp(&kb)
            .then_with(|| a.method.as_str().cmp(b.method.as_str()))
            .then_with(|| a.representation.as_str().cmp(b.representation.as_str()))
            .then_with(|| a.classifier.as_str().cmp(b.classifier.as_str()))
    });
}

/// Run the whole grid described by the config.
///
/// The baseline method `none` ignores `k_percents` and contributes one cell
/// per (representation, classifier); every other method contributes one
/// cell per k.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentCell>> {
    cfg.validate()?;

    let ds = load_corpus(&cfg.corpus)?;
    let stopwords = match &cfg.stopwords {
        Some(path) => load_stopwords(path)?,
        None => HashSet::new(),
    };
    let embeddings = match &cfg.embeddings {
        Some(path) => Some(load_embeddings(path)?),
        None => None,
    };

    let split_seed = mix(cfg.seed, stable_hash(&["split"]));
    let (train_ds, test_ds) = if cfg.stratified {
        split_stratified(&ds, cfg.test_fraction, split_seed)?
    } else {
        split(&ds, cfg.test_fraction, split_seed)?
    };

    let train_tokens: Vec<Vec<String>> =
        train_ds.records().iter().map(|r| tokenize(&r.text)).collect();
    let test_tokens: Vec<Vec<String>> =
        test_ds.records().iter().map(|r| tokenize(&r.text)).collect();

    let mut reps = IndexMap::new();
    for &representation in &cfg.representations {
        let artifacts = vectorize(
            representation,
            &train_tokens,
            &train_ds.labels(),
            &test_tokens,
            &test_ds.labels(),
            &stopwords,
            embeddings.as_ref(),
            pooling(cfg),
        )?;
        reps.insert(representation, artifacts);
    }

    let ctx = RunContext {
        cfg: cfg.clone(),
        test_labels: test_ds.labels(),
        train_ds,
        test_tokens,
        class_order: ds.classes().to_vec(),
        stopwords,
        embeddings,
        reps,
    };

    // Lay out the grid, then run the independent cells through the
    // execution helper.
    let mut coords = Vec::new();
    for &representation in &cfg.representations {
        for &classifier in &cfg.classifiers {
            for &method in &cfg.methods {
                if method == Method::None {
                    coords.push((method, representation, classifier, None));
                } else {
                    for &k in &cfg.k_percents {
                        coords.push((method, representation, classifier, Some(k)));
                    }
                }
            }
        }
    }

    let cells = exec::map_indexed(coords.len(), |i| {
        let (method, representation, classifier, k) = coords[i];
        run_cell(&ctx, method, representation, classifier, k).map_err(|source| Error::Cell {
            coordinate: format!(
                "{}/{}/{}/k={}",
                method.as_str(),
                representation.as_str(),
                classifier.as_str(),
                k.map_or_else(|| "none".to_string(), |k| k.to_string())
            ),
            source: Box::new(source),
        })
    });
    let mut cells: Vec<ExperimentCell> = cells.into_iter().collect::<Result<_>>()?;
    sort_cells(&mut cells);
    Ok(cells)
}
