use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checkpoint::{ModelCheckpoint, ProviderDescriptor};
use super::encode::{Encoder, Formulation, InputSource, PreparedDoc, Unit};
use super::network::{forward, loss_and_grads, ModelDims, ModelParams};
use super::vectors::ExternalVectors;
use super::vocab::Vocabulary;
use super::ModelError;
use crate::corpus::{Document, Label};
use crate::eval::compute_metrics;
use crate::nn::{adam_step, clip_global_norm, softmax, AdamConfig, AdamState, NnError, Tensor};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub formulation: Formulation,
    pub batch_size: usize,
    pub lr: f64,
    pub max_epochs: usize,
    pub seed: u64,
    pub clip_norm: f64,
    pub d_emb: usize,
    pub hidden: usize,
    /// Largest vocabulary kept, special tokens included.
    pub max_vocab: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let adam = AdamConfig::default();
        Self {
            formulation: Formulation::Sc,
            batch_size: 16,
            lr: adam.lr,
            max_epochs: 4,
            seed: 0,
            clip_norm: 5.0,
            d_emb: 64,
            hidden: 128,
            max_vocab: 50_000,
            beta1: adam.beta1,
            beta2: adam.beta2,
            eps: adam.eps,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.formulation.validate()?;
        let bad = |what: &str| Err(ModelError::InvalidConfig(format!("{what} must be positive")));
        if self.batch_size == 0 {
            return bad("batch_size");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr");
        }
        if !(self.clip_norm > 0.0) {
            return bad("clip_norm");
        }
        if self.d_emb == 0 {
            return bad("d_emb");
        }
        if self.formulation.is_sequence() && self.hidden == 0 {
            return bad("hidden");
        }
        if self.max_vocab < 4 {
            return Err(ModelError::InvalidConfig("max_vocab must be at least 4".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.eps > 0.0) {
            return Err(ModelError::InvalidConfig("Adam betas must lie in [0, 1) and eps be positive".into()));
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig { lr: self.lr, beta1: self.beta1, beta2: self.beta2, eps: self.eps }
    }

    /// Hidden size actually used: SC and SPC have no BiLSTM.
    pub fn effective_hidden(&self) -> usize {
        if self.formulation.is_sequence() {
            self.hidden
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    /// Mean per-sentence cross-entropy over the epoch.
    pub mean_loss: f64,
    pub val: Option<ValScores>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub formulation: Formulation,
    pub batch_size: usize,
    pub lr: f64,
    pub max_epochs: usize,
    pub train_documents: usize,
    pub train_units: usize,
    pub val_documents: usize,
    pub epochs: Vec<EpochLog>,
    /// Epoch whose parameters were kept; 0 is the initialization.
    pub selected_epoch: usize,
}

impl TrainLog {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("log serializes");
        s.push('\n');
        s
    }
}

/// Where sentence representations come from during training.
#[derive(Debug, Clone, Copy)]
pub enum ProviderSpec<'a> {
    /// Mean-pooled embeddings over a vocabulary built from the train split.
    Trainable,
    External(&'a ExternalVectors),
}

/// Label and cite probability for every sentence of each prepared document.
pub(crate) fn predict_prepared(
    encoder: &Encoder<'_>,
    params: &ModelParams,
    docs: &[PreparedDoc],
) -> Result<Vec<Vec<(Label, f64)>>, ModelError> {
    docs.par_iter()
        .map(|doc| {
            (1..=doc.len())
                .map(|i| {
                    let input = encoder.encode_prepared(doc, i)?;
                    let pass = forward(params, &input.slots)?;
                    let logits = pass.logits[input.target].as_ref().expect("target slot is never padding");
                    if logits.iter().any(|z| !z.is_finite()) {
                        return Err(NnError::NonFiniteInput.into());
                    }
                    let p = softmax(logits);
                    let label = if p[1] > p[0] { Label::Cite } else { Label::NoCite };
                    Ok((label, p[1]))
                })
                .collect()
        })
        .collect()
}

fn validate_scores(encoder: &Encoder<'_>, params: &ModelParams, docs: &[PreparedDoc]) -> Result<Option<ValScores>, ModelError> {
    if docs.iter().all(PreparedDoc::is_empty) {
        return Ok(None);
    }
    let preds: Vec<Label> = predict_prepared(encoder, params, docs)?.into_iter().flatten().map(|(l, _)| l).collect();
    let golds: Vec<Label> = docs.iter().flat_map(|d| d.labels.iter().copied()).collect();
    let r = compute_metrics(&preds, &golds)?;
    Ok(Some(ValScores { precision: r.precision, recall: r.recall, f1: r.f1 }))
}

/// Train one formulation with Adam over shuffled mini-batches, keeping the
/// parameters of the epoch with the best validation cite-class F1 (the
/// last epoch when there is no validation data).
pub fn train(
    train_docs: &[&Document],
    val_docs: &[&Document],
    config: &TrainConfig,
    provider: ProviderSpec<'_>,
) -> Result<ModelCheckpoint, ModelError> {
    config.validate()?;
    if train_docs.iter().all(|d| d.num_sentences() == 0) {
        return Err(ModelError::EmptySplit);
    }
    let vocabulary = match provider {
        ProviderSpec::Trainable => Some(Vocabulary::build(train_docs.iter().copied(), config.max_vocab)),
        ProviderSpec::External(_) => None,
    };
    let (source, descriptor, d_emb) = match (provider, &vocabulary) {
        (ProviderSpec::External(v), _) => (InputSource::Vectors(v), ProviderDescriptor::External { d_emb: v.dim() }, v.dim()),
        (ProviderSpec::Trainable, Some(vocab)) => (
            InputSource::Tokens(vocab),
            ProviderDescriptor::Trainable { vocab_size: vocab.len(), vocab_hash: vocab.hash() },
            config.d_emb,
        ),
        (ProviderSpec::Trainable, None) => unreachable!("vocabulary built above"),
    };
    let encoder = Encoder::new(config.formulation, source);
    let train_prepared = train_docs.iter().map(|d| encoder.prepare(d)).collect::<Result<Vec<_>, _>>()?;
    let val_prepared = val_docs.iter().map(|d| encoder.prepare(d)).collect::<Result<Vec<_>, _>>()?;
    let mut units: Vec<(usize, Unit)> = Vec::new();
    for (k, doc) in train_prepared.iter().enumerate() {
        units.extend(encoder.units(doc)?.into_iter().map(|u| (k, u)));
    }
    if units.is_empty() {
        return Err(ModelError::EmptySplit);
    }

    let mut rng = rng::seeded(config.seed);
    let dims = ModelDims::new(config.formulation, vocabulary.as_ref().map(Vocabulary::len), d_emb, config.effective_hidden());
    let mut params = ModelParams::init(dims, &mut rng);
    let mut grads = params.zeros_like();
    let mut adam = AdamState::new(config.adam(), params.named_tensors().into_iter().map(|(_, t)| t));
    let mut best = params.clone();
    let mut best_f1 = f64::NEG_INFINITY;
    let mut log = TrainLog {
        formulation: config.formulation,
        batch_size: config.batch_size,
        lr: config.lr,
        max_epochs: config.max_epochs,
        train_documents: train_docs.len(),
        train_units: units.len(),
        val_documents: val_docs.len(),
        epochs: Vec::new(),
        selected_epoch: 0,
    };
    info!(
        "training {} on {} documents ({} units), batch size {}, lr {}, up to {} epochs",
        config.formulation,
        train_docs.len(),
        units.len(),
        config.batch_size,
        config.lr,
        config.max_epochs
    );

    let mut order: Vec<usize> = (0..units.len()).collect();
    for epoch in 1..=config.max_epochs {
        rng::shuffle(&mut rng, &mut order);
        let mut epoch_loss = 0.0;
        let mut epoch_count = 0usize;
        for (b, batch) in order.chunks(config.batch_size).enumerate() {
            grads.fill_zero();
            let mut batch_loss = 0.0;
            let mut batch_count = 0usize;
            for &u in batch {
                let (k, unit) = &units[u];
                let example = encoder.example(&train_prepared[*k], unit)?;
                let (loss, count) = loss_and_grads(&params, &example, &mut grads).map_err(|e| match e {
                    ModelError::Nn(NnError::NonFiniteInput) => ModelError::DivergenceDetected { epoch, batch: b + 1 },
                    e => e,
                })?;
                batch_loss += loss;
                batch_count += count;
            }
            if !batch_loss.is_finite() {
                return Err(ModelError::DivergenceDetected { epoch, batch: b + 1 });
            }
            if batch_count == 0 {
                continue;
            }
            let k = 1.0 / batch_count as f64;
            let mut g = grads.tensors_mut();
            g.iter_mut().for_each(|t| t.scale(k));
            clip_global_norm(&mut g, config.clip_norm);
            let g: Vec<&Tensor> = g.into_iter().map(|t| &*t).collect();
            adam_step(&mut params.tensors_mut(), &g, &mut adam)?;
            epoch_loss += batch_loss;
            epoch_count += batch_count;
        }
        if !params.is_finite() {
            return Err(ModelError::DivergenceDetected { epoch, batch: 0 });
        }
        let mean_loss = epoch_loss / epoch_count.max(1) as f64;
        let val = validate_scores(&encoder, &params, &val_prepared)?;
        let score = val.as_ref().map(|v| v.f1).unwrap_or(f64::INFINITY);
        match &val {
            Some(v) => info!("epoch {epoch}: loss {mean_loss:.5}, val P {:.4} R {:.4} F1 {:.4}", v.precision, v.recall, v.f1),
            None => info!("epoch {epoch}: loss {mean_loss:.5}"),
        }
        if score > best_f1 || (val.is_none()) {
            best_f1 = score;
            best = params.clone();
            log.selected_epoch = epoch;
        }
        log.epochs.push(EpochLog { epoch, mean_loss, val });
    }

    Ok(ModelCheckpoint {
        config: *config,
        provider: descriptor,
        vocabulary,
        params: best,
        log,
        run_config: Default::default(),
    })
}
