use std::fmt;

use serde::{Deserialize, Serialize};

use super::tokenize::{MAX_PAIR_TOKENS, MAX_SENTENCE_TOKENS};
use super::vectors::ExternalVectors;
use super::vocab::{Vocabulary, SEP_ID};
use super::ModelError;
use crate::corpus::{CanonicalSection, Document, Label};
use crate::dataset::{check_window_length, make_inference_window, make_training_windows, DatasetError, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Formulation {
    /// Each sentence on its own.
    Sc,
    /// Sentence paired with its previous/current/next context.
    Spc { include_section: bool },
    /// Windows of `m` sentence-context pairs labeled jointly by a BiLSTM.
    Ssm { m: usize, include_section: bool },
}

impl Formulation {
    /// From a name (`sc`, `spc`, `ssm`) and the options that apply to it.
    pub fn parse(name: &str, m: usize, include_section: bool) -> Result<Self, ModelError> {
        let f = match name.to_ascii_lowercase().as_str() {
            "sc" => Formulation::Sc,
            "spc" => Formulation::Spc { include_section },
            "ssm" => Formulation::Ssm { m, include_section },
            other => return Err(ModelError::InvalidConfig(format!("unknown formulation {other:?}"))),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if let Formulation::Ssm { m, .. } = self {
            check_window_length(*m)?;
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Formulation::Sc => "sc",
            Formulation::Spc { .. } => "spc",
            Formulation::Ssm { .. } => "ssm",
        }
    }

    pub fn is_sequence(&self) -> bool {
        matches!(self, Formulation::Ssm { .. })
    }

    fn include_section(&self) -> bool {
        match self {
            Formulation::Sc => false,
            Formulation::Spc { include_section } | Formulation::Ssm { include_section, .. } => *include_section,
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formulation::Sc => write!(f, "sc"),
            Formulation::Spc { include_section } => {
                write!(f, "spc{}", if *include_section { "+section" } else { "" })
            }
            Formulation::Ssm { m, include_section } => {
                write!(f, "ssm(m={m}){}", if *include_section { "+section" } else { "" })
            }
        }
    }
}

/// What one sequence position feeds into the sentence encoder.
#[derive(Debug, Clone, PartialEq)]
pub enum SlotInput {
    /// Out-of-document position; encodes to the zero vector and is masked.
    Padding,
    Tokens(Vec<u32>),
    Vector(Vec<f64>),
}

impl SlotInput {
    pub fn is_padding(&self) -> bool {
        matches!(self, SlotInput::Padding)
    }
}

/// Encoded input for predicting one sentence: a single slot for SC and
/// SPC, the centered inference window for SSM.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedInput {
    pub slots: Vec<SlotInput>,
    /// Slot whose logits give the prediction.
    pub target: usize,
}

/// A training unit with the gold label of every non-padding slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub slots: Vec<SlotInput>,
    pub labels: Vec<Option<Label>>,
}

/// Source of sentence representations.
#[derive(Debug, Clone, Copy)]
pub enum InputSource<'a> {
    Tokens(&'a Vocabulary),
    Vectors(&'a ExternalVectors),
}

/// A document with its sentences tokenized once.
#[derive(Debug, Clone)]
pub struct PreparedDoc {
    pub doc_id: String,
    pub labels: Vec<Label>,
    pub sections: Vec<CanonicalSection>,
    /// Per-sentence token ids, empty when the source is vectors.
    tokens: Vec<Vec<u32>>,
}

impl PreparedDoc {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Encoder<'a> {
    pub formulation: Formulation,
    pub source: InputSource<'a>,
}

impl<'a> Encoder<'a> {
    pub fn new(formulation: Formulation, source: InputSource<'a>) -> Self {
        Self { formulation, source }
    }

    pub fn prepare(&self, doc: &Document) -> Result<PreparedDoc, ModelError> {
        let flat = doc.flat();
        let tokens = match self.source {
            InputSource::Tokens(vocab) => flat.iter().map(|s| vocab.encode(&s.sentence.text, MAX_SENTENCE_TOKENS)).collect(),
            InputSource::Vectors(vectors) => {
                if let Some(s) = flat.iter().find(|s| vectors.get(&doc.doc_id, s.index).is_none()) {
                    return Err(ModelError::MissingVector { doc_id: doc.doc_id.clone(), index: s.index });
                }
                Vec::new()
            }
        };
        Ok(PreparedDoc {
            doc_id: doc.doc_id.clone(),
            labels: flat.iter().map(|s| s.sentence.label).collect(),
            sections: flat.iter().map(|s| s.section).collect(),
            tokens,
        })
    }

    /// Input for sentence `j` (1-based) whose context may only draw on
    /// sentences `lo..=hi`.
    fn slot(&self, doc: &PreparedDoc, j: usize, lo: usize, hi: usize) -> Result<SlotInput, ModelError> {
        let vocab = match self.source {
            InputSource::Vectors(vectors) => {
                let v = vectors
                    .get(&doc.doc_id, j)
                    .ok_or_else(|| ModelError::MissingVector { doc_id: doc.doc_id.clone(), index: j })?;
                return Ok(SlotInput::Vector(v.iter().map(|&x| x as f64).collect()));
            }
            InputSource::Tokens(vocab) => vocab,
        };
        let own = &doc.tokens[j - 1];
        if self.formulation == Formulation::Sc {
            return Ok(SlotInput::Tokens(own.clone()));
        }
        let mut out = Vec::with_capacity(MAX_PAIR_TOKENS);
        out.extend_from_slice(own);
        out.push(SEP_ID);
        if self.formulation.include_section() {
            out.extend(vocab.encode(doc.sections[j - 1].name(), MAX_SENTENCE_TOKENS));
        }
        if j > lo {
            out.extend_from_slice(&doc.tokens[j - 2]);
        }
        out.extend_from_slice(own);
        if j < hi {
            out.extend_from_slice(&doc.tokens[j]);
        }
        out.truncate(MAX_PAIR_TOKENS);
        Ok(SlotInput::Tokens(out))
    }

    fn window_slots(&self, doc: &PreparedDoc, w: &Window) -> Result<Vec<SlotInput>, ModelError> {
        let real = w.indices.iter().copied().filter(|&i| i != 0);
        let lo = real.clone().min().unwrap_or(1);
        let hi = real.max().unwrap_or(0);
        w.indices
            .iter()
            .map(|&j| if j == 0 { Ok(SlotInput::Padding) } else { self.slot(doc, j, lo, hi) })
            .collect()
    }

    /// Input for predicting sentence `i` (1-based).
    pub fn encode_prepared(&self, doc: &PreparedDoc, i: usize) -> Result<EncodedInput, ModelError> {
        let n = doc.len();
        if i == 0 || i > n {
            return Err(DatasetError::IndexOutOfRange { index: i, len: n }.into());
        }
        match self.formulation {
            Formulation::Sc | Formulation::Spc { .. } => Ok(EncodedInput { slots: vec![self.slot(doc, i, 1, n)?], target: 0 }),
            Formulation::Ssm { m, .. } => {
                let w = make_inference_window(&doc.doc_id, n, i, m)?;
                let target = w.center_slot().expect("center lies inside its window");
                Ok(EncodedInput { slots: self.window_slots(doc, &w)?, target })
            }
        }
    }

    pub fn encode_input(&self, doc: &Document, i: usize) -> Result<EncodedInput, ModelError> {
        self.encode_prepared(&self.prepare(doc)?, i)
    }

    /// Training units of a document: every sentence for SC and SPC, every
    /// training window for SSM.
    pub fn units(&self, doc: &PreparedDoc) -> Result<Vec<Unit>, ModelError> {
        match self.formulation {
            Formulation::Sc | Formulation::Spc { .. } => Ok((1..=doc.len()).map(Unit::Sentence).collect()),
            Formulation::Ssm { m, .. } => {
                Ok(make_training_windows(&doc.doc_id, doc.len(), m)?.into_iter().map(Unit::Window).collect())
            }
        }
    }

    pub fn example(&self, doc: &PreparedDoc, unit: &Unit) -> Result<Example, ModelError> {
        match unit {
            Unit::Sentence(i) => {
                let n = doc.len();
                if *i == 0 || *i > n {
                    return Err(DatasetError::IndexOutOfRange { index: *i, len: n }.into());
                }
                Ok(Example { slots: vec![self.slot(doc, *i, 1, n)?], labels: vec![Some(doc.labels[i - 1])] })
            }
            Unit::Window(w) => Ok(Example {
                slots: self.window_slots(doc, w)?,
                labels: w.indices.iter().map(|&j| (j != 0).then(|| doc.labels[j - 1])).collect(),
            }),
        }
    }

    pub fn examples(&self, doc: &PreparedDoc) -> Result<Vec<Example>, ModelError> {
        self.units(doc)?.iter().map(|u| self.example(doc, u)).collect()
    }
}

/// One training unit before encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unit {
    Sentence(usize),
    Window(Window),
}
