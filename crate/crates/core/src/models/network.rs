use super::encode::{Example, Formulation, SlotInput};
use super::ModelError;
use crate::nn::{
    bilstm_backward, bilstm_forward, feedforward_backward, sentence_encode, sentence_encode_backward,
    softmax_cross_entropy, BiLstmParams, BiLstmTrace, FeedForward, NnError, Tensor,
};
use crate::rng::Rng;

pub const NUM_CLASSES: usize = 2;
const EMBEDDING_INIT: f64 = 0.05;

/// Parameters of one formulation. The embedding table is absent when
/// sentence vectors come from an external file; the BiLSTM is present only
/// for SSM.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub embedding: Option<Tensor>,
    pub bilstm: Option<BiLstmParams>,
    pub output: FeedForward,
}

/// Sizes that determine every parameter shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelDims {
    /// Vocabulary size, or `None` for external vectors.
    pub vocab_size: Option<usize>,
    pub d_emb: usize,
    pub hidden: usize,
    pub sequence: bool,
}

impl ModelDims {
    pub fn new(formulation: Formulation, vocab_size: Option<usize>, d_emb: usize, hidden: usize) -> Self {
        Self { vocab_size, d_emb, hidden, sequence: formulation.is_sequence() }
    }

    fn output_input(&self) -> usize {
        if self.sequence {
            2 * self.hidden
        } else {
            self.d_emb
        }
    }
}

impl ModelParams {
    pub fn zeros(dims: ModelDims) -> Self {
        Self {
            embedding: dims.vocab_size.map(|v| Tensor::zeros(&[v, dims.d_emb])),
            bilstm: dims.sequence.then(|| BiLstmParams::zeros(dims.d_emb, dims.hidden)),
            output: FeedForward::zeros(dims.output_input(), NUM_CLASSES),
        }
    }

    /// Embeddings, then BiLSTM, then output layer, all drawn from `rng`.
    pub fn init(dims: ModelDims, rng: &mut Rng) -> Self {
        let embedding = dims.vocab_size.map(|v| Tensor::uniform(&[v, dims.d_emb], -EMBEDDING_INIT, EMBEDDING_INIT, rng));
        let bilstm = dims.sequence.then(|| BiLstmParams::init(dims.d_emb, dims.hidden, rng));
        let output = FeedForward::init(dims.output_input(), NUM_CLASSES, rng);
        Self { embedding, bilstm, output }
    }

    pub fn dims(&self) -> ModelDims {
        let d_emb = match (&self.embedding, &self.bilstm) {
            (Some(e), _) => e.cols(),
            (None, Some(b)) => b.input_size(),
            (None, None) => self.output.input_size(),
        };
        ModelDims {
            vocab_size: self.embedding.as_ref().map(Tensor::rows),
            d_emb,
            hidden: self.bilstm.as_ref().map(BiLstmParams::hidden_size).unwrap_or(0),
            sequence: self.bilstm.is_some(),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            embedding: self.embedding.as_ref().map(Tensor::zeros_like),
            bilstm: self.bilstm.as_ref().map(BiLstmParams::zeros_like),
            output: self.output.zeros_like(),
        }
    }

    /// Every tensor with a stable name, in a fixed order.
    pub fn named_tensors(&self) -> Vec<(String, &Tensor)> {
        let mut out = Vec::new();
        if let Some(e) = &self.embedding {
            out.push(("embedding".to_string(), e));
        }
        if let Some(b) = &self.bilstm {
            out.extend(b.named_tensors());
        }
        out.push(("output.w".to_string(), &self.output.weight));
        out.push(("output.b".to_string(), &self.output.bias));
        out
    }

    /// Same order as [`ModelParams::named_tensors`].
    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = Vec::new();
        if let Some(e) = &mut self.embedding {
            out.push(e);
        }
        if let Some(b) = &mut self.bilstm {
            out.extend(b.tensors_mut());
        }
        out.push(&mut self.output.weight);
        out.push(&mut self.output.bias);
        out
    }

    pub fn fill_zero(&mut self) {
        self.tensors_mut().into_iter().for_each(|t| t.fill(0.0));
    }

    pub fn is_finite(&self) -> bool {
        self.named_tensors().iter().all(|(_, t)| t.is_finite())
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    xs: Vec<Vec<f64>>,
    trace: Option<BiLstmTrace>,
    /// Per slot, `None` at padding.
    pub logits: Vec<Option<Vec<f64>>>,
}

fn encode_slot(params: &ModelParams, slot: &SlotInput, d: usize) -> Result<Vec<f64>, ModelError> {
    match slot {
        SlotInput::Padding => Ok(vec![0.0; d]),
        SlotInput::Tokens(tokens) => {
            let table = params.embedding.as_ref().ok_or_else(|| {
                ModelError::IncompatibleCheckpoint("token input given to a model without an embedding table".into())
            })?;
            Ok(sentence_encode(tokens, table)?)
        }
        SlotInput::Vector(v) => {
            if params.embedding.is_some() {
                return Err(ModelError::IncompatibleCheckpoint("vector input given to a model with an embedding table".into()));
            }
            if v.len() != d {
                return Err(NnError::ShapeMismatch { context: "sentence vector", expected: vec![d], found: vec![v.len()] }.into());
            }
            Ok(v.clone())
        }
    }
}

/// Logits for every non-padding slot.
pub fn forward(params: &ModelParams, slots: &[SlotInput]) -> Result<ForwardPass, ModelError> {
    let d = params.dims().d_emb;
    let xs = slots.iter().map(|s| encode_slot(params, s, d)).collect::<Result<Vec<_>, _>>()?;
    match &params.bilstm {
        None => {
            if slots.len() != 1 || slots[0].is_padding() {
                return Err(NnError::ShapeMismatch { context: "single-sentence input", expected: vec![1], found: vec![slots.len()] }.into());
            }
            let logits = vec![Some(params.output.forward(&xs[0])?)];
            Ok(ForwardPass { xs, trace: None, logits })
        }
        Some(bilstm) => {
            let mask: Vec<bool> = slots.iter().map(|s| !s.is_padding()).collect();
            let trace = bilstm_forward(&xs, &mask, bilstm)?;
            let logits = trace
                .outputs()
                .iter()
                .zip(&mask)
                .map(|(h, &real)| if real { params.output.forward(h).map(Some) } else { Ok(None) })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ForwardPass { xs, trace: Some(trace), logits })
        }
    }
}

/// Accumulate gradients of a loss into `grads` given its gradient with
/// respect to each slot's logits (`None` at padding or unlabeled slots).
pub fn backward(
    params: &ModelParams,
    slots: &[SlotInput],
    pass: &ForwardPass,
    dlogits: &[Option<Vec<f64>>],
    grads: &mut ModelParams,
) -> Result<(), ModelError> {
    if dlogits.len() != slots.len() || pass.xs.len() != slots.len() {
        return Err(NnError::GraphMismatch(format!("{} logit gradients for {} slots", dlogits.len(), slots.len())).into());
    }
    let dxs: Vec<Vec<f64>> = match (&params.bilstm, &pass.trace) {
        (None, None) => {
            let dx = match &dlogits[0] {
                Some(dl) => feedforward_backward(&pass.xs[0], &params.output, dl, &mut grads.output)?,
                None => vec![0.0; pass.xs[0].len()],
            };
            vec![dx]
        }
        (Some(bilstm), Some(trace)) => {
            let hs = trace.outputs();
            let dh = hs
                .iter()
                .zip(dlogits)
                .map(|(h, dl)| match dl {
                    Some(dl) => feedforward_backward(h, &params.output, dl, &mut grads.output),
                    None => Ok(vec![0.0; h.len()]),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let gb = grads.bilstm.as_mut().ok_or_else(|| NnError::GraphMismatch("gradient set lacks BiLSTM".into()))?;
            bilstm_backward(bilstm, trace, &dh, gb)?
        }
        _ => return Err(NnError::GraphMismatch("forward pass recorded for a different architecture".into()).into()),
    };
    if let Some(gtable) = &mut grads.embedding {
        for (slot, dx) in slots.iter().zip(&dxs) {
            if let SlotInput::Tokens(tokens) = slot {
                sentence_encode_backward(tokens, dx, gtable)?;
            }
        }
    }
    Ok(())
}

/// Summed cross-entropy over the labeled slots of `example`, with its
/// gradient accumulated into `grads`. Returns the sum and the number of
/// labeled slots.
pub fn loss_and_grads(params: &ModelParams, example: &Example, grads: &mut ModelParams) -> Result<(f64, usize), ModelError> {
    let pass = forward(params, &example.slots)?;
    let mut total = 0.0;
    let mut count = 0;
    let mut dlogits = Vec::with_capacity(example.slots.len());
    for (logits, label) in pass.logits.iter().zip(&example.labels) {
        match (logits, label) {
            (Some(z), Some(label)) => {
                let (loss, dz) = softmax_cross_entropy(z, label.class_index())?;
                total += loss;
                count += 1;
                dlogits.push(Some(dz));
            }
            _ => dlogits.push(None),
        }
    }
    backward(params, &example.slots, &pass, &dlogits, grads)?;
    Ok((total, count))
}

/// Summed loss only.
pub fn loss(params: &ModelParams, example: &Example) -> Result<f64, ModelError> {
    let pass = forward(params, &example.slots)?;
    let mut total = 0.0;
    for (logits, label) in pass.logits.iter().zip(&example.labels) {
        if let (Some(z), Some(label)) = (logits, label) {
            total += softmax_cross_entropy(z, label.class_index())?.0;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;
    use crate::rng;

    fn ssm_dims() -> ModelDims {
        ModelDims::new(Formulation::Ssm { m: 4, include_section: false }, Some(12), 5, 3)
    }

    fn window() -> Example {
        Example {
            slots: vec![
                SlotInput::Padding,
                SlotInput::Tokens(vec![3, 4, 2, 5]),
                SlotInput::Tokens(vec![6, 6, 7]),
                SlotInput::Tokens(vec![]),
            ],
            labels: vec![None, Some(Label::Cite), Some(Label::NoCite), Some(Label::Cite)],
        }
    }

    #[test]
    fn zero_parameters_give_zero_logits() {
        let p = ModelParams::zeros(ssm_dims());
        let pass = forward(&p, &window().slots).unwrap();
        assert_eq!(pass.logits.len(), 4);
        assert_eq!(pass.logits[0], None);
        assert!(pass.logits[1..].iter().all(|l| l.as_deref() == Some(&[0.0, 0.0][..])));
    }

    #[test]
    fn single_sentence_document() {
        let mut r = rng::seeded(1);
        let p = ModelParams::init(ssm_dims(), &mut r);
        let slots = vec![SlotInput::Padding, SlotInput::Padding, SlotInput::Tokens(vec![3]), SlotInput::Padding];
        let pass = forward(&p, &slots).unwrap();
        assert_eq!(pass.logits.iter().filter(|l| l.is_some()).count(), 1);
    }

    #[test]
    fn zero_upstream_gradient_gives_zero_gradients() {
        let mut r = rng::seeded(2);
        let p = ModelParams::init(ssm_dims(), &mut r);
        let ex = window();
        let pass = forward(&p, &ex.slots).unwrap();
        let dl: Vec<_> = pass.logits.iter().map(|l| l.as_ref().map(|_| vec![0.0, 0.0])).collect();
        let mut g = p.zeros_like();
        backward(&p, &ex.slots, &pass, &dl, &mut g).unwrap();
        assert!(g.named_tensors().iter().all(|(_, t)| t.data().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut r = rng::seeded(3);
        let mut p = ModelParams::init(ssm_dims(), &mut r);
        let ex = window();
        let mut g = p.zeros_like();
        loss_and_grads(&p, &ex, &mut g).unwrap();
        let grads: Vec<Vec<f64>> = g.named_tensors().iter().map(|(_, t)| t.data().to_vec()).collect();
        let h = 1e-5;
        let n_tensors = grads.len();
        for k in 0..n_tensors {
            let len = p.tensors_mut()[k].len();
            for idx in (0..len).step_by(7) {
                let orig = p.tensors_mut()[k].data()[idx];
                p.tensors_mut()[k].data_mut()[idx] = orig + h;
                let up = loss(&p, &ex).unwrap();
                p.tensors_mut()[k].data_mut()[idx] = orig - h;
                let down = loss(&p, &ex).unwrap();
                p.tensors_mut()[k].data_mut()[idx] = orig;
                let numeric = (up - down) / (2.0 * h);
                let analytic = grads[k][idx];
                let scale = numeric.abs().max(analytic.abs()).max(1e-6);
                assert!((numeric - analytic).abs() / scale < 1e-4, "tensor {k} index {idx}: {numeric} vs {analytic}");
            }
        }
    }

    #[test]
    fn vectors_reject_token_models() {
        let p = ModelParams::zeros(ModelDims::new(Formulation::Sc, Some(4), 3, 0));
        assert!(forward(&p, &[SlotInput::Vector(vec![0.0; 3])]).is_err());
        let p = ModelParams::zeros(ModelDims::new(Formulation::Sc, None, 3, 0));
        assert!(forward(&p, &[SlotInput::Vector(vec![0.0; 2])]).is_err());
        assert!(forward(&p, &[SlotInput::Vector(vec![0.0; 3])]).is_ok());
    }
}
