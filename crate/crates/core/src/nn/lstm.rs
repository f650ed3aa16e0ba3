//! Single-layer bidirectional LSTM with masked positions.
//!
//! Cell equations, per gate `k ∈ {input, forget, output, candidate}`:
//!
//! ```text
//! a_k = W_k·x_t + U_k·h_{t-1} + b_k
//! i = σ(a_i)  f = σ(a_f)  o = σ(a_o)  g = tanh(a_g)
//! c_t = f ⊙ c_{t-1} + i ⊙ g
//! h_t = o ⊙ tanh(c_t)
//! ```
//!
//! A masked position leaves the recurrent state untouched and emits a zero
//! output, so padding never influences real positions.

use super::tensor::{expect_shape, matvec_acc, matvec_t_acc, outer_acc};
use super::{NnError, Tensor};
use crate::rng::Rng;

pub const GATE_NAMES: [&str; 4] = ["input", "forget", "output", "candidate"];
const INPUT: usize = 0;
const FORGET: usize = 1;
const OUTPUT: usize = 2;
const CANDIDATE: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    /// Input weights, `[H, d_in]`.
    pub w: Tensor,
    /// Recurrent weights, `[H, H]`.
    pub u: Tensor,
    pub b: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell {
    pub gates: [Gate; 4],
}

impl LstmCell {
    pub fn zeros(input_size: usize, hidden: usize) -> Self {
        let gate = || Gate {
            w: Tensor::zeros(&[hidden, input_size]),
            u: Tensor::zeros(&[hidden, hidden]),
            b: Tensor::zeros(&[hidden]),
        };
        Self { gates: [gate(), gate(), gate(), gate()] }
    }

    /// Weights uniform in ±1/√H; forget-gate bias 1, other biases 0.
    pub fn init(input_size: usize, hidden: usize, rng: &mut Rng) -> Self {
        let k = 1.0 / (hidden as f64).sqrt();
        let mut gate = |bias: f64| Gate {
            w: Tensor::uniform(&[hidden, input_size], -k, k, rng),
            u: Tensor::uniform(&[hidden, hidden], -k, k, rng),
            b: Tensor::filled(&[hidden], bias),
        };
        Self { gates: [gate(0.0), gate(1.0), gate(0.0), gate(0.0)] }
    }

    pub fn hidden_size(&self) -> usize {
        self.gates[0].b.len()
    }

    pub fn input_size(&self) -> usize {
        self.gates[0].w.cols()
    }

    fn check(&self) -> Result<(), NnError> {
        let (h, d) = (self.hidden_size(), self.input_size());
        for g in &self.gates {
            expect_shape("lstm input weights", &g.w, &[h, d])?;
            expect_shape("lstm recurrent weights", &g.u, &[h, h])?;
            expect_shape("lstm bias", &g.b, &[h])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiLstmParams {
    pub forward: LstmCell,
    pub backward: LstmCell,
}

impl BiLstmParams {
    pub fn zeros(input_size: usize, hidden: usize) -> Self {
        Self { forward: LstmCell::zeros(input_size, hidden), backward: LstmCell::zeros(input_size, hidden) }
    }

    pub fn init(input_size: usize, hidden: usize, rng: &mut Rng) -> Self {
        let forward = LstmCell::init(input_size, hidden, rng);
        let backward = LstmCell::init(input_size, hidden, rng);
        Self { forward, backward }
    }

    pub fn hidden_size(&self) -> usize {
        self.forward.hidden_size()
    }

    pub fn input_size(&self) -> usize {
        self.forward.input_size()
    }

    pub fn output_size(&self) -> usize {
        2 * self.hidden_size()
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.input_size(), self.hidden_size())
    }

    /// Every tensor with a stable name, forward direction first.
    pub fn named_tensors(&self) -> Vec<(String, &Tensor)> {
        let mut out = Vec::with_capacity(24);
        for (dir, cell) in [("fwd", &self.forward), ("bwd", &self.backward)] {
            for (name, g) in GATE_NAMES.iter().zip(&cell.gates) {
                out.push((format!("bilstm.{dir}.{name}.w"), &g.w));
                out.push((format!("bilstm.{dir}.{name}.u"), &g.u));
                out.push((format!("bilstm.{dir}.{name}.b"), &g.b));
            }
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = Vec::with_capacity(24);
        for cell in [&mut self.forward, &mut self.backward] {
            for g in cell.gates.iter_mut() {
                out.push(&mut g.w);
                out.push(&mut g.u);
                out.push(&mut g.b);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
struct Step {
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    acts: [Vec<f64>; 4],
    tanh_c: Vec<f64>,
}

#[derive(Debug, Clone)]
struct DirectionTrace {
    /// Indexed by sequence position; `None` at masked positions.
    steps: Vec<Option<Step>>,
}

/// Everything the backward pass needs from a forward pass.
#[derive(Debug, Clone)]
pub struct BiLstmTrace {
    xs: Vec<Vec<f64>>,
    mask: Vec<bool>,
    hidden: usize,
    forward: DirectionTrace,
    backward: DirectionTrace,
    outputs: Vec<Vec<f64>>,
}

impl BiLstmTrace {
    /// `h_t = [forward h_t ; backward h_t]`, zero at masked positions.
    pub fn outputs(&self) -> &[Vec<f64>] {
        &self.outputs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn run_direction(cell: &LstmCell, xs: &[Vec<f64>], mask: &[bool], order: impl Iterator<Item = usize>) -> (DirectionTrace, Vec<Vec<f64>>) {
    let h = cell.hidden_size();
    let mut h_prev = vec![0.0; h];
    let mut c_prev = vec![0.0; h];
    let mut steps = vec![None; xs.len()];
    let mut outs = vec![vec![0.0; h]; xs.len()];
    for t in order {
        if !mask[t] {
            continue;
        }
        let mut acts: [Vec<f64>; 4] = Default::default();
        for (k, gate) in cell.gates.iter().enumerate() {
            let mut a = gate.b.data().to_vec();
            matvec_acc(&mut a, &gate.w, &xs[t]);
            matvec_acc(&mut a, &gate.u, &h_prev);
            let f: fn(f64) -> f64 = if k == CANDIDATE { f64::tanh } else { sigmoid };
            a.iter_mut().for_each(|v| *v = f(*v));
            acts[k] = a;
        }
        let c: Vec<f64> = (0..h)
            .map(|j| acts[FORGET][j] * c_prev[j] + acts[INPUT][j] * acts[CANDIDATE][j])
            .collect();
        let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
        let h_t: Vec<f64> = (0..h).map(|j| acts[OUTPUT][j] * tanh_c[j]).collect();
        outs[t] = h_t.clone();
        steps[t] = Some(Step { h_prev: std::mem::replace(&mut h_prev, h_t), c_prev: std::mem::replace(&mut c_prev, c), acts, tanh_c });
    }
    (DirectionTrace { steps }, outs)
}

/// Run both directions over `xs`. `mask[t] == false` marks padding.
pub fn bilstm_forward(xs: &[Vec<f64>], mask: &[bool], params: &BiLstmParams) -> Result<BiLstmTrace, NnError> {
    params.forward.check()?;
    params.backward.check()?;
    if params.forward.input_size() != params.backward.input_size()
        || params.forward.hidden_size() != params.backward.hidden_size()
    {
        return Err(NnError::ShapeMismatch {
            context: "bilstm directions",
            expected: vec![params.forward.hidden_size(), params.forward.input_size()],
            found: vec![params.backward.hidden_size(), params.backward.input_size()],
        });
    }
    if xs.is_empty() {
        return Err(NnError::ShapeMismatch { context: "bilstm sequence length", expected: vec![1], found: vec![0] });
    }
    if mask.len() != xs.len() {
        return Err(NnError::ShapeMismatch { context: "bilstm mask", expected: vec![xs.len()], found: vec![mask.len()] });
    }
    let d = params.input_size();
    if let Some(x) = xs.iter().find(|x| x.len() != d) {
        return Err(NnError::ShapeMismatch { context: "bilstm input", expected: vec![d], found: vec![x.len()] });
    }
    let n = xs.len();
    let (fwd, fwd_out) = run_direction(&params.forward, xs, mask, 0..n);
    let (bwd, bwd_out) = run_direction(&params.backward, xs, mask, (0..n).rev());
    let outputs = fwd_out.into_iter().zip(bwd_out).map(|(mut a, b)| {
        a.extend(b);
        a
    });
    Ok(BiLstmTrace {
        xs: xs.to_vec(),
        mask: mask.to_vec(),
        hidden: params.hidden_size(),
        forward: fwd,
        backward: bwd,
        outputs: outputs.collect(),
    })
}

fn backprop_direction(
    cell: &LstmCell,
    trace: &DirectionTrace,
    xs: &[Vec<f64>],
    dh_out: &[&[f64]],
    order: impl Iterator<Item = usize>,
    grads: &mut LstmCell,
    dxs: &mut [Vec<f64>],
) {
    let h = cell.hidden_size();
    let mut dh_next = vec![0.0; h];
    let mut dc_next = vec![0.0; h];
    for t in order {
        let Some(step) = &trace.steps[t] else { continue };
        let [i, f, o, g] = &step.acts;
        let mut da: [Vec<f64>; 4] = [vec![0.0; h], vec![0.0; h], vec![0.0; h], vec![0.0; h]];
        for j in 0..h {
            let dh = dh_out[t][j] + dh_next[j];
            let tc = step.tanh_c[j];
            let dc = dc_next[j] + dh * o[j] * (1.0 - tc * tc);
            da[OUTPUT][j] = dh * tc * o[j] * (1.0 - o[j]);
            da[INPUT][j] = dc * g[j] * i[j] * (1.0 - i[j]);
            da[FORGET][j] = dc * step.c_prev[j] * f[j] * (1.0 - f[j]);
            da[CANDIDATE][j] = dc * i[j] * (1.0 - g[j] * g[j]);
            dc_next[j] = dc * f[j];
        }
        let mut dh_prev = vec![0.0; h];
        for k in 0..4 {
            let gate = &cell.gates[k];
            let grad = &mut grads.gates[k];
            outer_acc(&mut grad.w, &da[k], &xs[t]);
            outer_acc(&mut grad.u, &da[k], &step.h_prev);
            grad.b.data_mut().iter_mut().zip(&da[k]).for_each(|(b, d)| *b += d);
            matvec_t_acc(&mut dxs[t], &gate.w, &da[k]);
            matvec_t_acc(&mut dh_prev, &gate.u, &da[k]);
        }
        dh_next = dh_prev;
    }
}

/// Accumulate parameter gradients into `grads` given `dh[t]`, the gradient of
/// the loss with respect to output `t` (width 2H). Returns input gradients;
/// masked positions receive zeros.
pub fn bilstm_backward(
    params: &BiLstmParams,
    trace: &BiLstmTrace,
    dh: &[Vec<f64>],
    grads: &mut BiLstmParams,
) -> Result<Vec<Vec<f64>>, NnError> {
    let n = trace.xs.len();
    let hidden = trace.hidden;
    if dh.len() != n || dh.iter().any(|d| d.len() != 2 * hidden) {
        return Err(NnError::GraphMismatch(format!(
            "upstream gradient has {} positions, trace has {n} of width {}",
            dh.len(),
            2 * hidden
        )));
    }
    if params.hidden_size() != hidden || grads.hidden_size() != hidden || grads.input_size() != params.input_size() {
        return Err(NnError::GraphMismatch("parameters do not match the recorded forward pass".into()));
    }
    let d = params.input_size();
    let mut dxs = vec![vec![0.0; d]; n];
    let fwd_dh: Vec<&[f64]> = dh.iter().map(|v| &v[..hidden]).collect();
    let bwd_dh: Vec<&[f64]> = dh.iter().map(|v| &v[hidden..]).collect();
    backprop_direction(&params.forward, &trace.forward, &trace.xs, &fwd_dh, (0..n).rev(), &mut grads.forward, &mut dxs);
    backprop_direction(&params.backward, &trace.backward, &trace.xs, &bwd_dh, 0..n, &mut grads.backward, &mut dxs);
    for (dx, &m) in dxs.iter_mut().zip(&trace.mask) {
        if !m {
            dx.iter_mut().for_each(|v| *v = 0.0);
        }
    }
    Ok(dxs)
}
