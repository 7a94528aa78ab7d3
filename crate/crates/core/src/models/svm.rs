//! One-vs-rest kernel SVM trained by seeded stochastic subgradient descent
//! on the regularized hinge loss, in the kernel's dual representation.
//!
//! The trainer keeps one dual coefficient per training row and per class.
//! The kernel matrix is computed once and shared by all the binary
//! problems, which is what makes the one-vs-rest reduction cheap at this
//! scale.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::matrix::{DenseMatrix, FeatureMatrix};
use crate::models::{argmax_tie_first, class_ids, Predictions};
use crate::seed::rng_from;

/// Kernel function for the dual scorer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let sq: f64 = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| {
                        let d = x - y;
                        d * d
                    })
                    .sum();
                (-gamma * sq).exp()
            }
        }
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone)]
pub struct SvmParams {
    pub kernel: Kernel,
    /// Regularization strength of the primal objective.
    pub lambda: f64,
    /// Passes over the shuffled training set.
    pub epochs: usize,
    pub seed: u64,
    /// Record the per-class primal objective after each epoch.
    pub record_objective: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            kernel: Kernel::Rbf { gamma: 0.001 },
            lambda: 1e-3,
            epochs: 50,
            seed: 0,
            record_objective: false,
        }
    }
}

/// Fitted one-vs-rest scorer: predicted class is the argmax of the per-class
/// decision values, ties broken by class order.
#[derive(Debug, Clone)]
pub struct SvmClassifier {
    train: DenseMatrix,
    class_order: Vec<String>,
    kernel: Kernel,
    /// Per class: folded dual coefficients `alpha_j * y_j / (lambda * T)`.
    coefs: Vec<Vec<f64>>,
    /// Per class, per epoch: primal objective, if recorded during fit.
    objective_trace: Vec<Vec<f64>>,
}

impl SvmClassifier {
    pub fn fit(fm: &FeatureMatrix, params: &SvmParams) -> Result<Self> {
        let n = fm.len();
        if n < 2 {
            return Err(Error::invalid("svm needs at least 2 training rows"));
        }
        let (class_order, ids) = class_ids(fm);
        if class_order.len() < 2 {
            return Err(Error::invalid("svm needs at least 2 classes"));
        }
        if params.lambda <= 0.0 {
            return Err(Error::invalid("lambda must be positive"));
        }
        if params.epochs == 0 {
            return Err(Error::invalid("epochs must be positive"));
        }
        if let Kernel::Rbf { gamma } = params.kernel {
            if gamma <= 0.0 {
                return Err(Error::invalid("rbf gamma must be positive"));
            }
        }

        let x = fm.features();
        // Symmetric kernel matrix, built in parallel row blocks and shared
        // by every binary subproblem.
        let gram: Vec<Vec<f64>> = exec::map_indexed(n, |i| {
            (0..n).map(|j| params.kernel.eval(x.row(i), x.row(j))).collect()
        });

        // One shared visit sequence keeps training deterministic per seed.
        let mut rng = rng_from(params.seed);
        let total_steps = params.epochs * n;
        let visits: Vec<usize> = (0..total_steps).map(|_| rng.random_range(0..n)).collect();

        let lambda = params.lambda;
        let per_class: Vec<(Vec<f64>, Vec<f64>)> = exec::map_indexed(class_order.len(), |c| {
            let y: Vec<f64> = ids.iter().map(|&id| if id == c { 1.0 } else { -1.0 }).collect();
            let mut alpha = vec![0.0f64; n];
            // scores[i] tracks sum_j alpha_j y_j K(j, i).
            let mut scores = vec![0.0f64; n];
            let mut trace = Vec::new();
            let mut t = 0usize;

            for epoch in 0..params.epochs {
                for step in 0..n {
                    t += 1;
                    let i = visits[epoch * n + step];
                    let margin = y[i] * scores[i] / (lambda * t as f64);
                    if margin < 1.0 {
                        alpha[i] += 1.0;
                        let row = &gram[i];
                        for (s, k) in scores.iter_mut().zip(row) {
                            *s += y[i] * k;
                        }
                    }
                }
                if params.record_objective {
                    let scale = 1.0 / (lambda * t as f64);
                    let w_sq: f64 = (0..n).map(|i| alpha[i] * y[i] * scores[i]).sum::<f64>()
                        * scale
                        * scale;
                    let hinge: f64 = (0..n)
                        .map(|i| (1.0 - y[i] * scores[i] * scale).max(0.0))
                        .sum::<f64>()
                        / n as f64;
                    trace.push(lambda / 2.0 * w_sq + hinge);
                }
            }

            let scale = 1.0 / (lambda * total_steps as f64);
            let coefs = (0..n).map(|i| alpha[i] * y[i] * scale).collect();
            (coefs, trace)
        });

        let mut coefs = Vec::with_capacity(class_order.len());
        let mut objective_trace = Vec::with_capacity(class_order.len());
        for (c, trace) in per_class {
            coefs.push(c);
            objective_trace.push(trace);
        }

        Ok(Self {
            train: x.clone(),
            class_order,
            kernel: params.kernel,
            coefs,
            objective_trace,
        })
    }

    /// Per-class primal objective after each epoch (empty unless
    /// `record_objective` was set at fit time).
    pub fn objective_trace(&self) -> &[Vec<f64>] {
        &self.objective_trace
    }

    pub fn class_order(&self) -> &[String] {
        &self.class_order
    }

    /// Raw decision values, one row per query, one column per class.
    pub fn decision_scores(&self, queries: &DenseMatrix) -> Result<DenseMatrix> {
        if queries.cols() != self.train.cols() {
            return Err(Error::invalid(format!(
                "queries have dimension {}, model expects {}",
                queries.cols(),
                self.train.cols()
            )));
        }
        let n_classes = self.class_order.len();
        let rows: Vec<Vec<f64>> = exec::map_indexed(queries.rows(), |q| {
            let kvec: Vec<f64> = (0..self.train.rows())
                .map(|j| self.kernel.eval(self.train.row(j), queries.row(q)))
                .collect();
            (0..n_classes)
                .map(|c| self.coefs[c].iter().zip(&kvec).map(|(a, k)| a * k).sum())
                .collect()
        });
        DenseMatrix::from_rows(&rows)
    }

    pub fn predict(&self, queries: &DenseMatrix) -> Result<Predictions> {
        let scores = self.decision_scores(queries)?;
        let labels = (0..scores.rows())
            .map(|q| self.class_order[argmax_tie_first(scores.row(q))].clone())
            .collect();
        Ok(Predictions {
            labels,
            scores: Some(scores),
            class_order: self.class_order.clone(),
        })
    }
}
