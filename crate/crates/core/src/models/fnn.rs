//! Feedforward softmax network: sigmoid hidden layers, inverted dropout
//! during training, mean cross-entropy loss minimized with Adam on
//! minibatches.
//!
//! The analytic gradient is exposed through [`FnnClassifier::loss_and_gradient`]
//! (dropout disabled) so tests can check it against central finite
//! differences.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, FeatureMatrix};
use crate::models::{argmax_tie_first, class_ids, Predictions};
use crate::seed::rng_from;

/// Training hyperparameters. Batch size 8 and dropout 0.5 are the working
/// defaults of the whole benchmark.
#[derive(Debug, Clone)]
pub struct FnnParams {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Probability of zeroing a hidden activation during training. Inverted
    /// dropout: survivors are scaled by `1/(1-p)`, so inference needs no
    /// correction.
    pub dropout: f64,
    pub seed: u64,
}

impl Default for FnnParams {
    fn default() -> Self {
        Self {
            hidden: vec![64],
            epochs: 200,
            learning_rate: 1e-3,
            batch_size: 8,
            dropout: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
struct Layer {
    /// fan_in x fan_out.
    w: DenseMatrix,
    b: Vec<f64>,
}

#[derive(Debug, Clone)]
struct LayerGrad {
    w: DenseMatrix,
    b: Vec<f64>,
}

/// Fitted network; prediction runs the forward pass with dropout disabled.
#[derive(Debug, Clone)]
pub struct FnnClassifier {
    layers: Vec<Layer>,
    class_order: Vec<String>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// (m x k)(k x n), loops ordered for row-major access.
fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (m, k, n) = (a.rows(), a.cols(), b.cols());
    let mut c = DenseMatrix::zeros(m, n);
    for i in 0..m {
        let arow = a.row(i);
        let crow = c.row_mut(i);
        for (p, &apk) in arow.iter().enumerate().take(k) {
            let brow = b.row(p);
            for j in 0..n {
                crow[j] += apk * brow[j];
            }
        }
    }
    c
}

/// a^T b for a (m x k), b (m x n): result k x n.
fn matmul_at_b(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (m, k, n) = (a.rows(), a.cols(), b.cols());
    let mut c = DenseMatrix::zeros(k, n);
    for i in 0..m {
        let arow = a.row(i);
        let brow = b.row(i);
        for (p, &aip) in arow.iter().enumerate().take(k) {
            let crow = c.row_mut(p);
            for j in 0..n {
                crow[j] += aip * brow[j];
            }
        }
    }
    c
}

/// a b^T for a (m x k), b (n x k): result m x n.
fn matmul_a_bt(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (m, k, n) = (a.rows(), a.cols(), b.rows());
    let mut c = DenseMatrix::zeros(m, n);
    for i in 0..m {
        let arow = a.row(i);
        let crow = c.row_mut(i);
        for j in 0..n {
            let brow = b.row(j);
            let mut acc = 0.0;
            for p in 0..k {
                acc += arow[p] * brow[p];
            }
            crow[j] = acc;
        }
    }
    c
}

fn add_bias_rows(z: &mut DenseMatrix, b: &[f64]) {
    for r in 0..z.rows() {
        for (v, bias) in z.row_mut(r).iter_mut().zip(b) {
            *v += bias;
        }
    }
}

/// Row-stable softmax plus the mean negative log-likelihood of `targets`.
fn softmax_and_loss(logits: &DenseMatrix, targets: &[usize]) -> (DenseMatrix, f64) {
    let mut probs = logits.clone();
    let mut loss = 0.0;
    for r in 0..probs.rows() {
        let row = probs.row_mut(r);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
        loss -= row[targets[r]] - lse;
        for z in row.iter_mut() {
            *z = (*z - lse).exp();
        }
    }
    (probs, loss / logits.rows() as f64)
}

struct BackpropResult {
    loss: f64,
    grads: Vec<LayerGrad>,
}

/// Forward and backward over one batch. `masks` (one per hidden layer,
/// entries 0 or 1/(1-p)) apply inverted dropout; `None` disables it.
fn forward_backward(
    layers: &[Layer],
    x: &DenseMatrix,
    targets: &[usize],
    masks: Option<&[DenseMatrix]>,
) -> BackpropResult {
    let n_hidden = layers.len() - 1;
    let batch = x.rows();

    // Forward, caching each layer's input and the pre-dropout sigmoids.
    let mut inputs: Vec<DenseMatrix> = Vec::with_capacity(layers.len());
    let mut sigmoids: Vec<DenseMatrix> = Vec::with_capacity(n_hidden);
    let mut activation = x.clone();
    for (l, layer) in layers.iter().take(n_hidden).enumerate() {
        inputs.push(activation.clone());
        let mut z = matmul(&activation, &layer.w);
        add_bias_rows(&mut z, &layer.b);
        for r in 0..z.rows() {
            for v in z.row_mut(r).iter_mut() {
                *v = sigmoid(*v);
            }
        }
        sigmoids.push(z.clone());
        if let Some(masks) = masks {
            let mask = &masks[l];
            for r in 0..z.rows() {
                for (v, m) in z.row_mut(r).iter_mut().zip(mask.row(r)) {
                    *v *= m;
                }
            }
        }
        activation = z;
    }
    inputs.push(activation.clone());
    let mut logits = matmul(&activation, &layers[n_hidden].w);
    add_bias_rows(&mut logits, &layers[n_hidden].b);
    let (probs, loss) = softmax_and_loss(&logits, targets);

    // Backward. d_z starts as (probs - onehot) / batch.
    let mut d_z = probs;
    for (r, &t) in targets.iter().enumerate() {
        let row = d_z.row_mut(r);
        row[t] -= 1.0;
        for v in row.iter_mut() {
            *v /= batch as f64;
        }
    }

    let mut grads: Vec<Option<LayerGrad>> = (0..layers.len()).map(|_| None).collect();
    for l in (0..layers.len()).rev() {
        let gw = matmul_at_b(&inputs[l], &d_z);
        let mut gb = vec![0.0; d_z.cols()];
        for r in 0..d_z.rows() {
            for (acc, v) in gb.iter_mut().zip(d_z.row(r)) {
                *acc += v;
            }
        }
        grads[l] = Some(LayerGrad { w: gw, b: gb });
        if l == 0 {
            break;
        }
        // Through the weights, then the dropout mask, then the sigmoid.
        let mut d_a = matmul_a_bt(&d_z, &layers[l].w);
        let h = &sigmoids[l - 1];
        for r in 0..d_a.rows() {
            let hrow = h.row(r);
            let mrow = masks.map(|m| m[l - 1].row(r));
            for (j, v) in d_a.row_mut(r).iter_mut().enumerate() {
                if let Some(m) = mrow {
                    *v *= m[j];
                }
                *v *= hrow[j] * (1.0 - hrow[j]);
            }
        }
        d_z = d_a;
    }

    BackpropResult {
        loss,
        grads: grads.into_iter().map(Option::unwrap).collect(),
    }
}

struct AdamState {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    step: usize,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl AdamState {
    fn new(layers: &[Layer]) -> Self {
        let sizes: Vec<usize> = layers
            .iter()
            .map(|l| l.w.rows() * l.w.cols() + l.b.len())
            .collect();
        Self {
            m: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            v: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            step: 0,
        }
    }

    fn update(&mut self, layers: &mut [Layer], grads: &[LayerGrad], lr: f64) {
        self.step += 1;
        let t = self.step as f64;
        let bias1 = 1.0 - ADAM_BETA1.powf(t);
        let bias2 = 1.0 - ADAM_BETA2.powf(t);
        for (l, layer) in layers.iter_mut().enumerate() {
            let g: Vec<f64> = grads[l]
                .w
                .data()
                .iter()
                .chain(&grads[l].b)
                .copied()
                .collect();
            let m = &mut self.m[l];
            let v = &mut self.v[l];
            let wlen = layer.w.rows() * layer.w.cols();
            for (i, &gi) in g.iter().enumerate() {
                m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * gi;
                v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * gi * gi;
                let mhat = m[i] / bias1;
                let vhat = v[i] / bias2;
                let delta = lr * mhat / (vhat.sqrt() + ADAM_EPS);
                if i < wlen {
                    let (r, c) = (i / layer.w.cols(), i % layer.w.cols());
                    layer.w.set(r, c, layer.w.get(r, c) - delta);
                } else {
                    layer.b[i - wlen] -= delta;
                }
            }
        }
    }
}

fn draw_mask(rng: &mut ChaCha8Rng, rows: usize, cols: usize, dropout: f64) -> DenseMatrix {
    let keep_scale = 1.0 / (1.0 - dropout);
    let mut m = DenseMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let keep = rng.random::<f64>() >= dropout;
            m.set(r, c, if keep { keep_scale } else { 0.0 });
        }
    }
    m
}

impl FnnClassifier {
    pub fn fit(fm: &FeatureMatrix, params: &FnnParams) -> Result<Self> {
        let (class_order, ids) = class_ids(fm);
        if class_order.len() < 2 {
            return Err(Error::invalid("fnn needs at least 2 classes"));
        }
        if params.hidden.iter().any(|&h| h == 0) {
            return Err(Error::invalid("hidden layer sizes must be positive"));
        }
        if params.batch_size == 0 {
            return Err(Error::invalid("batch size must be positive"));
        }
        if !(0.0..1.0).contains(&params.dropout) {
            return Err(Error::invalid("dropout must lie in [0, 1)"));
        }
        if params.learning_rate <= 0.0 {
            return Err(Error::invalid("learning rate must be positive"));
        }

        let mut rng = rng_from(params.seed);
        let mut dims = vec![fm.dim()];
        dims.extend(&params.hidden);
        dims.push(class_order.len());

        // Symmetric uniform init scaled by fan-in; biases start at zero.
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for pair in dims.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let mut w = DenseMatrix::zeros(fan_in, fan_out);
            for r in 0..fan_in {
                for c in 0..fan_out {
                    w.set(r, c, rng.random_range(-bound..bound));
                }
            }
            layers.push(Layer {
                w,
                b: vec![0.0; fan_out],
            });
        }

        let n = fm.len();
        let x = fm.features();
        let mut adam = AdamState::new(&layers);
        let mut order: Vec<usize> = (0..n).collect();
        let n_hidden = params.hidden.len();

        for _ in 0..params.epochs {
            use rand::seq::SliceRandom;
            order.shuffle(&mut rng);
            for chunk in order.chunks(params.batch_size) {
                let rows: Vec<Vec<f64>> = chunk.iter().map(|&i| x.row(i).to_vec()).collect();
                let batch = DenseMatrix::from_rows(&rows)?;
                let targets: Vec<usize> = chunk.iter().map(|&i| ids[i]).collect();

                let masks: Option<Vec<DenseMatrix>> = if params.dropout > 0.0 {
                    Some(
                        (0..n_hidden)
                            .map(|l| {
                                draw_mask(&mut rng, chunk.len(), dims[l + 1], params.dropout)
                            })
                            .collect(),
                    )
                } else {
                    None
                };
                let result = forward_backward(&layers, &batch, &targets, masks.as_deref());
                adam.update(&mut layers, &result.grads, params.learning_rate);
            }
        }

        Ok(Self {
            layers,
            class_order,
        })
    }

    pub fn class_order(&self) -> &[String] {
        &self.class_order
    }

    fn input_dim(&self) -> usize {
        self.layers[0].w.rows()
    }

    fn check_queries(&self, queries: &DenseMatrix) -> Result<()> {
        if queries.cols() != self.input_dim() {
            return Err(Error::invalid(format!(
                "queries have dimension {}, model expects {}",
                queries.cols(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// Softmax class probabilities, dropout disabled.
    pub fn predict_scores(&self, queries: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_queries(queries)?;
        let n_hidden = self.layers.len() - 1;
        let mut a = queries.clone();
        for layer in self.layers.iter().take(n_hidden) {
            let mut z = matmul(&a, &layer.w);
            add_bias_rows(&mut z, &layer.b);
            for r in 0..z.rows() {
                for v in z.row_mut(r).iter_mut() {
                    *v = sigmoid(*v);
                }
            }
            a = z;
        }
        let mut logits = matmul(&a, &self.layers[n_hidden].w);
        add_bias_rows(&mut logits, &self.layers[n_hidden].b);
        let targets = vec![0; logits.rows()];
        let (probs, _) = softmax_and_loss(&logits, &targets);
        Ok(probs)
    }

    pub fn predict(&self, queries: &DenseMatrix) -> Result<Predictions> {
        let scores = self.predict_scores(queries)?;
        let labels = (0..scores.rows())
            .map(|r| self.class_order[argmax_tie_first(scores.row(r))].clone())
            .collect();
        Ok(Predictions {
            labels,
            scores: Some(scores),
            class_order: self.class_order.clone(),
        })
    }

    /// Mean cross-entropy on a fixed batch, dropout disabled.
    pub fn loss(&self, x: &DenseMatrix, targets: &[usize]) -> Result<f64> {
        let (loss, _) = self.loss_and_gradient(x, targets)?;
        Ok(loss)
    }

    /// Loss and the analytic gradient over all parameters, flattened in
    /// [`flat_params`](Self::flat_params) order. Dropout disabled.
    pub fn loss_and_gradient(&self, x: &DenseMatrix, targets: &[usize]) -> Result<(f64, Vec<f64>)> {
        self.check_queries(x)?;
        if x.rows() != targets.len() {
            return Err(Error::invalid("one target per batch row required"));
        }
        let n_classes = self.class_order.len();
        if targets.iter().any(|&t| t >= n_classes) {
            return Err(Error::invalid("target class id out of range"));
        }
        let result = forward_backward(&self.layers, x, targets, None);
        let mut flat = Vec::new();
        for g in &result.grads {
            flat.extend_from_slice(g.w.data());
            flat.extend_from_slice(&g.b);
        }
        Ok((result.loss, flat))
    }

    /// All parameters, layer by layer: weights row-major, then biases.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for layer in &self.layers {
            flat.extend_from_slice(layer.w.data());
            flat.extend_from_slice(&layer.b);
        }
        flat
    }

    /// Overwrite all parameters from a flat buffer laid out like
    /// [`flat_params`](Self::flat_params).
    pub fn set_flat_params(&mut self, params: &[f64]) -> Result<()> {
        let expected: usize = self
            .layers
            .iter()
            .map(|l| l.w.rows() * l.w.cols() + l.b.len())
            .sum();
        if params.len() != expected {
            return Err(Error::invalid(format!(
                "{} parameters supplied, model has {expected}",
                params.len()
            )));
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            let wlen = layer.w.rows() * layer.w.cols();
            let cols = layer.w.cols();
            for i in 0..wlen {
                layer.w.set(i / cols, i % cols, params[offset + i]);
            }
            offset += wlen;
            let blen = layer.b.len();
            layer.b.copy_from_slice(&params[offset..offset + blen]);
            offset += blen;
        }
        Ok(())
    }
}
