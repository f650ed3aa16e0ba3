use super::tensor::{expect_shape, matvec_acc, matvec_t_acc, outer_acc};
use super::{NnError, Tensor};

/// Mean of the embedding rows of `tokens`; an empty list gives the zero
/// vector.
pub fn sentence_encode(tokens: &[u32], table: &Tensor) -> Result<Vec<f64>, NnError> {
    let d = table.cols();
    let mut out = vec![0.0; d];
    if tokens.is_empty() {
        return Ok(out);
    }
    for &t in tokens {
        if t as usize >= table.rows() {
            return Err(NnError::UnknownTokenId { id: t, vocab_size: table.rows() });
        }
        out.iter_mut().zip(table.row(t as usize)).for_each(|(o, e)| *o += e);
    }
    let k = 1.0 / tokens.len() as f64;
    out.iter_mut().for_each(|o| *o *= k);
    Ok(out)
}

/// Scatter `dvec / len` back onto the rows of `tokens`. Repeated tokens
/// accumulate once per occurrence.
pub fn sentence_encode_backward(tokens: &[u32], dvec: &[f64], dtable: &mut Tensor) -> Result<(), NnError> {
    if tokens.is_empty() {
        return Ok(());
    }
    if dvec.len() != dtable.cols() {
        return Err(NnError::GraphMismatch(format!(
            "sentence gradient width {} vs embedding width {}",
            dvec.len(),
            dtable.cols()
        )));
    }
    let k = 1.0 / tokens.len() as f64;
    for &t in tokens {
        if t as usize >= dtable.rows() {
            return Err(NnError::UnknownTokenId { id: t, vocab_size: dtable.rows() });
        }
        dtable.row_mut(t as usize).iter_mut().zip(dvec).for_each(|(g, d)| *g += k * d);
    }
    Ok(())
}

/// Output layer mapping a representation to class logits.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedForward {
    /// `[classes, input]`.
    pub weight: Tensor,
    pub bias: Tensor,
}

impl FeedForward {
    pub fn zeros(input: usize, classes: usize) -> Self {
        Self { weight: Tensor::zeros(&[classes, input]), bias: Tensor::zeros(&[classes]) }
    }

    /// Xavier-uniform weights, zero bias.
    pub fn init(input: usize, classes: usize, rng: &mut crate::rng::Rng) -> Self {
        let limit = (6.0 / (input + classes) as f64).sqrt();
        Self { weight: Tensor::uniform(&[classes, input], -limit, limit, rng), bias: Tensor::zeros(&[classes]) }
    }

    pub fn input_size(&self) -> usize {
        self.weight.cols()
    }

    pub fn zeros_like(&self) -> Self {
        Self { weight: self.weight.zeros_like(), bias: self.bias.zeros_like() }
    }

    pub fn forward(&self, h: &[f64]) -> Result<Vec<f64>, NnError> {
        feedforward_logits(h, &self.weight, &self.bias)
    }
}

/// `W·h + b`.
pub fn feedforward_logits(h: &[f64], w: &Tensor, b: &Tensor) -> Result<Vec<f64>, NnError> {
    if w.shape().len() != 2 || w.cols() != h.len() {
        return Err(NnError::ShapeMismatch { context: "feed-forward weight", expected: vec![w.rows(), h.len()], found: w.shape().to_vec() });
    }
    expect_shape("feed-forward bias", b, &[w.rows()])?;
    let mut out = b.data().to_vec();
    matvec_acc(&mut out, w, h);
    Ok(out)
}

/// Accumulate `dW`, `db` and return `dh` for upstream `dlogits`.
pub fn feedforward_backward(h: &[f64], layer: &FeedForward, dlogits: &[f64], grads: &mut FeedForward) -> Result<Vec<f64>, NnError> {
    if dlogits.len() != layer.weight.rows() || h.len() != layer.weight.cols() {
        return Err(NnError::GraphMismatch(format!(
            "feed-forward backward with {} logits and input width {}",
            dlogits.len(),
            h.len()
        )));
    }
    outer_acc(&mut grads.weight, dlogits, h);
    grads.bias.data_mut().iter_mut().zip(dlogits).for_each(|(g, d)| *g += d);
    let mut dh = vec![0.0; h.len()];
    matvec_t_acc(&mut dh, &layer.weight, dlogits);
    Ok(dh)
}

/// Numerically stable softmax (max subtracted first).
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Cross-entropy of `logits` against class `gold`, with its gradient
/// `softmax(logits) - one_hot(gold)`.
pub fn softmax_cross_entropy(logits: &[f64], gold: usize) -> Result<(f64, Vec<f64>), NnError> {
    if logits.iter().any(|z| !z.is_finite()) {
        return Err(NnError::NonFiniteInput);
    }
    if gold >= logits.len() {
        return Err(NnError::ShapeMismatch { context: "gold class", expected: vec![logits.len()], found: vec![gold] });
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_total = logits.iter().map(|&z| (z - max).exp()).sum::<f64>().ln();
    let loss = -(logits[gold] - max - log_total);
    let mut grad = softmax(logits);
    grad[gold] -= 1.0;
    Ok((loss, grad))
}
