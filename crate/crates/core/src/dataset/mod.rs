//! Splits, contexts, windows and statistics over labeled documents.

mod context;
mod io;
mod split;
mod stats;
mod window;

use thiserror::Error;

pub use context::{build_context, ContextString, CONTEXT_SEPARATOR};
pub use io::{
    read_dataset, read_manifest, write_dataset, write_manifest, DatasetHeader, SplitManifest,
    DATASET_SCHEMA_VERSION, MANIFEST_SCHEMA_VERSION,
};
pub use split::{split_documents, SplitAssignment, SplitPart, SplitRatios, DEFAULT_RATIOS};
pub use stats::{compute_stats, CorpusStats};
pub use window::{
    check_window_length, make_inference_window, make_training_windows, Window, WindowPurpose,
};

use crate::corpus::Document;

#[derive(Error, Debug)]
pub enum DatasetError {
    #[error("need at least 3 documents to split, found {found}")]
    InsufficientDocuments { found: usize },
    #[error("split ratios must be positive and sum to 1, got {ratios:?}")]
    BadRatios { ratios: [f64; 3] },
    #[error("sentence index {index} out of range for document of {len} sentences")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("window length must be even and at least 2, got {m}")]
    BadWindowLength { m: usize },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("schema version mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: u32, found: String },
    #[error("{path}:{line}: {message}")]
    Io { path: String, line: usize, message: String },
}

/// Training windows over a whole document.
pub fn document_training_windows(doc: &Document, m: usize) -> Result<Vec<Window>, DatasetError> {
    make_training_windows(&doc.doc_id, doc.num_sentences(), m)
}

/// Centered inference window for sentence `i` (1-based) of a document.
pub fn document_inference_window(doc: &Document, i: usize, m: usize) -> Result<Window, DatasetError> {
    make_inference_window(&doc.doc_id, doc.num_sentences(), i, m)
}

/// Documents of `documents` whose ids fall in `part` of the split, in the
/// order they appear in `documents`.
pub fn select_part<'a>(documents: &'a [Document], split: &SplitAssignment, part: SplitPart) -> Vec<&'a Document> {
    let ids: std::collections::HashSet<&str> = split.part(part).iter().map(String::as_str).collect();
    documents.iter().filter(|d| ids.contains(d.doc_id.as_str())).collect()
}

/// Build a document from `(section header, sentence texts)` pairs, one
/// paragraph per section, every sentence labeled no-cite.
#[cfg(test)]
pub(crate) fn test_doc(doc_id: &str, sections: &[(&str, &[&str])]) -> Document {
    use crate::corpus::{CanonicalSection, Label, Paragraph, Section, Sentence};
    Document {
        doc_id: doc_id.into(),
        sections: sections
            .iter()
            .map(|(header, sentences)| Section {
                header: header.to_string(),
                canonical: CanonicalSection::from_header(header),
                paragraphs: vec![Paragraph {
                    sentences: sentences
                        .iter()
                        .map(|s| Sentence { text: s.to_string(), label: Label::NoCite, original_text: s.to_string() })
                        .collect(),
                }],
            })
            .collect(),
    }
}
