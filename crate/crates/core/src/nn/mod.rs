//! Numerical core: tensors, sentence encoding, BiLSTM, output layer,
//! cross-entropy and Adam. All training math is `f64`.

mod adam;
mod layers;
mod lstm;
mod tensor;

use thiserror::Error;

pub use adam::{adam_step, clip_global_norm, AdamConfig, AdamState};
pub use layers::{
    feedforward_backward, feedforward_logits, sentence_encode, sentence_encode_backward, softmax,
    softmax_cross_entropy, FeedForward,
};
pub use lstm::{bilstm_backward, bilstm_forward, BiLstmParams, BiLstmTrace, Gate, LstmCell, GATE_NAMES};
pub use tensor::Tensor;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum NnError {
    #[error("shape mismatch in {context}: expected {expected:?}, found {found:?}")]
    ShapeMismatch { context: &'static str, expected: Vec<usize>, found: Vec<usize> },
    #[error("token id {id} outside vocabulary of {vocab_size}")]
    UnknownTokenId { id: u32, vocab_size: usize },
    #[error("non-finite logits")]
    NonFiniteInput,
    #[error("backward pass does not match forward pass: {0}")]
    GraphMismatch(String),
}
