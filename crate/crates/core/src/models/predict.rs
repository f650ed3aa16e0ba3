use serde::{Deserialize, Serialize};

use super::checkpoint::ModelCheckpoint;
use super::train::predict_prepared;
use super::vectors::ExternalVectors;
use super::ModelError;
use crate::corpus::{Document, Label};

/// One output row: `{doc_id, index, label, p_cite}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub doc_id: String,
    pub index: usize,
    pub label: Label,
    pub p_cite: f64,
}

/// Predictions grouped per input document, in input order.
pub fn predict_documents(
    checkpoint: &ModelCheckpoint,
    documents: &[&Document],
    vectors: Option<&ExternalVectors>,
) -> Result<Vec<Vec<Prediction>>, ModelError> {
    let encoder = checkpoint.encoder(vectors)?;
    let prepared = documents.iter().map(|d| encoder.prepare(d)).collect::<Result<Vec<_>, _>>()?;
    let raw = predict_prepared(&encoder, &checkpoint.params, &prepared)?;
    Ok(raw
        .into_iter()
        .zip(documents)
        .map(|(rows, doc)| {
            rows.into_iter()
                .enumerate()
                .map(|(k, (label, p_cite))| Prediction { doc_id: doc.doc_id.clone(), index: k + 1, label, p_cite })
                .collect()
        })
        .collect())
}

/// Per-sentence predictions ordered by `(doc_id, index)`. Documents are
/// processed in parallel; the ordering does not depend on scheduling.
pub fn predict(
    checkpoint: &ModelCheckpoint,
    documents: &[&Document],
    vectors: Option<&ExternalVectors>,
) -> Result<Vec<Prediction>, ModelError> {
    let mut out: Vec<Prediction> = predict_documents(checkpoint, documents, vectors)?.into_iter().flatten().collect();
    out.sort_by(|a, b| a.doc_id.cmp(&b.doc_id).then(a.index.cmp(&b.index)));
    Ok(out)
}
