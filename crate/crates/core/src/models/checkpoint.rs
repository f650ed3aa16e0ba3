//! Versioned on-disk model format.
//!
//! Layout, little endian: the 8-byte magic `CWMODEL\0`, a `u32` format
//! version, a `u64` header length and that many bytes of JSON header, a
//! `u32` tensor count, then per tensor a `u32` name length, the UTF-8 name,
//! a `u32` rank, `u64` dimensions and the `f64` payload in row-major order.
//! The file ends with the first 8 bytes of the SHA-256 of everything before
//! them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::encode::{Encoder, Formulation, InputSource};
use super::network::{ModelDims, ModelParams};
use super::train::{TrainConfig, TrainLog};
use super::vectors::ExternalVectors;
use super::vocab::Vocabulary;
use super::ModelError;
use crate::corpus::Document;
use crate::provenance::{RunConfig, TOOL_VERSION};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"CWMODEL\0";
pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;
const CHECKSUM_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProviderDescriptor {
    Trainable { vocab_size: usize, vocab_hash: String },
    External { d_emb: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelCheckpoint {
    pub config: TrainConfig,
    pub provider: ProviderDescriptor,
    pub vocabulary: Option<Vocabulary>,
    pub params: ModelParams,
    pub log: TrainLog,
    pub run_config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorInfo {
    pub name: String,
    pub shape: Vec<usize>,
}

/// JSON header of a checkpoint file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub tool_version: String,
    pub formulation: Formulation,
    pub d_emb: usize,
    #[serde(rename = "H")]
    pub hidden: usize,
    pub vocab_hash: Option<String>,
    pub hyperparameters: TrainConfig,
    pub provider: ProviderDescriptor,
    pub training_log: TrainLog,
    pub run_config: RunConfig,
    pub tensors: Vec<TensorInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<Vocabulary>,
}

fn corrupt(message: impl Into<String>) -> ModelError {
    ModelError::CorruptCheckpoint(message.into())
}

impl ModelCheckpoint {
    pub fn formulation(&self) -> Formulation {
        self.config.formulation
    }

    pub fn header(&self) -> CheckpointHeader {
        let dims = self.params.dims();
        CheckpointHeader {
            format_version: CHECKPOINT_FORMAT_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            formulation: self.config.formulation,
            d_emb: dims.d_emb,
            hidden: dims.hidden,
            vocab_hash: self.vocabulary.as_ref().map(Vocabulary::hash),
            hyperparameters: self.config,
            provider: self.provider.clone(),
            training_log: self.log.clone(),
            run_config: self.run_config.clone(),
            tensors: self
                .params
                .named_tensors()
                .into_iter()
                .map(|(name, t)| TensorInfo { name, shape: t.shape().to_vec() })
                .collect(),
            vocabulary: self.vocabulary.clone(),
        }
    }

    /// Check that the stored provider fits the parameters and, for external
    /// vectors, the supplied file; return the matching encoder.
    pub fn encoder<'a>(&'a self, vectors: Option<&'a ExternalVectors>) -> Result<Encoder<'a>, ModelError> {
        let dims = self.params.dims();
        let source = match (&self.provider, &self.vocabulary) {
            (ProviderDescriptor::Trainable { vocab_size, vocab_hash }, Some(vocab)) => {
                if vocab.len() != *vocab_size || dims.vocab_size != Some(*vocab_size) || vocab.hash() != *vocab_hash {
                    return Err(ModelError::IncompatibleCheckpoint("stored vocabulary does not match its descriptor".into()));
                }
                InputSource::Tokens(vocab)
            }
            (ProviderDescriptor::Trainable { .. }, None) => {
                return Err(ModelError::IncompatibleCheckpoint("trainable provider without a vocabulary".into()))
            }
            (ProviderDescriptor::External { d_emb }, _) => {
                let v = vectors.ok_or_else(|| {
                    ModelError::IncompatibleCheckpoint("checkpoint expects external vectors but none were given".into())
                })?;
                if v.dim() != *d_emb || dims.d_emb != *d_emb {
                    return Err(ModelError::IncompatibleCheckpoint(format!(
                        "checkpoint expects {d_emb}-dimensional vectors, file has {}",
                        v.dim()
                    )));
                }
                InputSource::Vectors(v)
            }
        };
        Ok(Encoder::new(self.config.formulation, source))
    }

    /// Rebuild the vocabulary from `train_docs` and require it to equal the
    /// stored one.
    pub fn check_vocabulary<'a>(&self, train_docs: impl IntoIterator<Item = &'a Document>) -> Result<(), ModelError> {
        if let ProviderDescriptor::Trainable { vocab_hash, .. } = &self.provider {
            let rebuilt = Vocabulary::build(train_docs, self.config.max_vocab).hash();
            if rebuilt != *vocab_hash {
                return Err(ModelError::IncompatibleCheckpoint(format!(
                    "vocabulary hash {rebuilt} of the data differs from checkpoint hash {vocab_hash}"
                )));
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = serde_json::to_vec(&self.header()).expect("header serializes");
        let mut out = Vec::new();
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(header.len() as u64).to_le_bytes());
        out.extend_from_slice(&header);
        let tensors = self.params.named_tensors();
        out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
        for (name, t) in tensors {
            out.extend_from_slice(&(name.len() as u32).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.extend_from_slice(&(t.shape().len() as u32).to_le_bytes());
            for &d in t.shape() {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            for v in t.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest[..CHECKSUM_LEN]);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        let mut cur = Reader { bytes, pos: 0 };
        if cur.take(CHECKPOINT_MAGIC.len())? != CHECKPOINT_MAGIC {
            return Err(corrupt("not a checkpoint file"));
        }
        let version = cur.u32()?;
        if version != CHECKPOINT_FORMAT_VERSION {
            return Err(ModelError::FormatVersionMismatch { expected: CHECKPOINT_FORMAT_VERSION, found: version });
        }
        if bytes.len() < CHECKSUM_LEN {
            return Err(corrupt("file truncated"));
        }
        let (body, checksum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
        if Sha256::digest(body)[..CHECKSUM_LEN] != *checksum {
            return Err(corrupt("checksum mismatch"));
        }
        cur.bytes = body;
        let header_len = usize::try_from(cur.u64()?).map_err(|_| corrupt("header length overflows"))?;
        let header: CheckpointHeader =
            serde_json::from_slice(cur.take(header_len)?).map_err(|e| corrupt(format!("header: {e}")))?;
        if header.format_version != version {
            return Err(corrupt("header and file format versions differ"));
        }
        header.hyperparameters.formulation.validate().map_err(|e| corrupt(e.to_string()))?;
        let vocab_size = match &header.provider {
            ProviderDescriptor::Trainable { vocab_size, .. } => Some(*vocab_size),
            ProviderDescriptor::External { .. } => None,
        };
        let dims = ModelDims::new(header.formulation, vocab_size, header.d_emb, header.hidden);
        let mut params = ModelParams::zeros(dims);
        let expected: Vec<TensorInfo> = params
            .named_tensors()
            .into_iter()
            .map(|(name, t)| TensorInfo { name, shape: t.shape().to_vec() })
            .collect();
        if expected != header.tensors {
            return Err(corrupt("tensor table does not match the model dimensions"));
        }
        let count = cur.u32()? as usize;
        if count != expected.len() {
            return Err(corrupt(format!("expected {} tensors, found {count}", expected.len())));
        }
        for (info, tensor) in expected.iter().zip(params.tensors_mut()) {
            let name_len = cur.u32()? as usize;
            let name = std::str::from_utf8(cur.take(name_len)?).map_err(|_| corrupt("tensor name is not UTF-8"))?;
            let rank = cur.u32()? as usize;
            let shape = (0..rank).map(|_| cur.u64().map(|d| d as usize)).collect::<Result<Vec<_>, _>>()?;
            if name != info.name || shape != info.shape {
                return Err(corrupt(format!("unexpected tensor {name} {shape:?}, wanted {} {:?}", info.name, info.shape)));
            }
            for v in tensor.data_mut() {
                *v = f64::from_le_bytes(cur.take(8)?.try_into().expect("8 bytes"));
            }
        }
        if cur.pos != body.len() {
            return Err(corrupt("trailing bytes after tensors"));
        }
        let checkpoint = ModelCheckpoint {
            config: header.hyperparameters,
            provider: header.provider,
            vocabulary: header.vocabulary,
            params,
            log: header.training_log,
            run_config: header.run_config,
        };
        if let (Some(vocab), Some(hash)) = (&checkpoint.vocabulary, &header.vocab_hash) {
            if vocab.hash() != *hash {
                return Err(corrupt("vocabulary does not match its hash"));
            }
        }
        Ok(checkpoint)
    }
}

/// Path of the human-readable header written next to a checkpoint.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Write the checkpoint and its JSON sidecar (header without the
/// vocabulary list).
pub fn save_checkpoint(path: &Path, checkpoint: &ModelCheckpoint) -> Result<(), ModelError> {
    fs::write(path, checkpoint.to_bytes())?;
    let mut header = checkpoint.header();
    header.vocabulary = None;
    let mut json = serde_json::to_string_pretty(&header).expect("header serializes");
    json.push('\n');
    fs::write(sidecar_path(path), json)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<ModelCheckpoint, ModelError> {
    ModelCheckpoint::from_bytes(&fs::read(path)?)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelError> {
        let end = self.pos.checked_add(n).ok_or_else(|| corrupt("length overflows"))?;
        let slice = self.bytes.get(self.pos..end).ok_or_else(|| corrupt("file truncated"))?;
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32, ModelError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, ModelError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

