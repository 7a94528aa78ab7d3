//! Library for benchmarking synthetic oversampling methods on imbalanced
//! multi-class text classification.
//!
//! The pipeline: load a labeled sentence corpus, split it, vectorize the
//! text (Bag-of-Words, TF-IDF or summed word embeddings), rebalance the
//! training matrix with an oversampler (random duplication, interpolation
//! toward same-class neighbors, boundary-restricted interpolation, or
//! adaptive per-sample budgets), fit a classifier (KNN, one-vs-rest kernel
//! SVM, or a feedforward softmax network), and score the untouched test set
//! with accuracy and macro-averaged precision/recall/F1.
//!
//! Everything randomized takes an explicit seed and is reproducible; inner
//! data-parallel loops run on rayon when the `parallel` feature (default)
//! is enabled and sequentially otherwise, with identical output either way.

pub mod corpus;
pub mod error;
pub mod exec;
pub mod harness;
pub mod matrix;
pub mod metrics;
pub mod models;
pub mod neighbors;
pub mod resample;
pub mod seed;
pub mod textfeat;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, FeatureKind, FeatureMatrix};
