//! The three formulations (per-sentence, sentence-context pair and
//! sentence sequence), their training loop, prediction and checkpoints.

mod checkpoint;
mod encode;
mod network;
mod predict;
pub mod synthetic;
mod tokenize;
mod train;
mod vectors;
mod vocab;

use thiserror::Error;

pub use checkpoint::{
    load_checkpoint, save_checkpoint, sidecar_path, CheckpointHeader, ModelCheckpoint, ProviderDescriptor, TensorInfo,
    CHECKPOINT_FORMAT_VERSION, CHECKPOINT_MAGIC,
};
pub use encode::{EncodedInput, Encoder, Example, Formulation, InputSource, PreparedDoc, SlotInput, Unit};
pub use network::{backward, forward, loss, loss_and_grads, ForwardPass, ModelDims, ModelParams, NUM_CLASSES};
pub use predict::{predict, predict_documents, Prediction};
pub use tokenize::{tokenize, MAX_PAIR_TOKENS, MAX_SENTENCE_TOKENS, NUMBER_TOKEN};
pub use train::{train, EpochLog, ProviderSpec, TrainConfig, TrainLog, ValScores};
pub use vectors::{doc_hash, write_binary_vectors, write_jsonl_vectors, ExternalVectors, VectorRecord, VECTORS_FORMAT_VERSION};
pub use vocab::{Vocabulary, PAD_ID, PAD_TOKEN, SEP_ID, SEP_TOKEN, UNK_ID, UNK_TOKEN};

use crate::dataset::DatasetError;
use crate::eval::EvalError;
use crate::nn::NnError;

#[derive(Error, Debug)]
pub enum ModelError {
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("training split has no sentences")]
    EmptySplit,
    #[error("non-finite loss in epoch {epoch}, batch {batch}")]
    DivergenceDetected { epoch: usize, batch: usize },
    #[error("incompatible checkpoint: {0}")]
    IncompatibleCheckpoint(String),
    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    FormatVersionMismatch { expected: u32, found: u32 },
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("no external vector for sentence {index} of document {doc_id}")]
    MissingVector { doc_id: String, index: usize },
    #[error("vector file: {0}")]
    VectorFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
