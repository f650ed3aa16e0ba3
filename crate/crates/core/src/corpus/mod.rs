//! Raw article text to labeled, sanitized documents.

mod parse;
mod patterns;
mod segment;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{
    build_corpus, has_abstract_header, is_header_line, parse_document, read_articles,
    read_article_file, BuiltCorpus, SkipRecord,
};
pub use patterns::{CitationPattern, PatternSet, DEFAULT_PATTERNS, DEFAULT_PATTERNS_VERSION};
pub use segment::segment_sentences;

#[derive(Error, Debug)]
pub enum CorpusError {
    #[error("document {doc_id:?} has an empty body")]
    EmptyDocument { doc_id: String },
    #[error("document {doc_id:?} has no abstract")]
    NoAbstract { doc_id: String },
    #[error("document {doc_id:?} yields no sentences")]
    NoSentences { doc_id: String },
    #[error("all {skipped} input articles were skipped")]
    AllDocumentsSkipped { skipped: usize },
    #[error("no input articles")]
    NoInput,
    #[error("pattern file line {line}: {message}")]
    Pattern { line: usize, message: String },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Citation-worthiness label of a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "cite")]
    Cite,
    #[serde(rename = "no_cite")]
    NoCite,
}

impl Label {
    pub fn is_cite(self) -> bool {
        self == Label::Cite
    }

    /// Class index used by the classifiers: 0 = no-cite, 1 = cite.
    pub fn class_index(self) -> usize {
        match self {
            Label::NoCite => 0,
            Label::Cite => 1,
        }
    }

    pub fn from_class_index(index: usize) -> Self {
        if index == 1 {
            Label::Cite
        } else {
            Label::NoCite
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Cite => "cite",
            Label::NoCite => "no_cite",
        })
    }
}

/// Normalized section bucket used for per-section evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CanonicalSection {
    Abstract,
    Acknowledgments,
    Conclusion,
    Evaluation,
    Introduction,
    Methods,
    #[serde(rename = "Related Work")]
    RelatedWork,
    Other,
}

// Checked in order; the first bucket with a matching keyword wins.
const SECTION_KEYWORDS: &[(CanonicalSection, &[&str])] = &[
    (CanonicalSection::Abstract, &["abstract"]),
    (CanonicalSection::Acknowledgments, &["acknowledg"]),
    (CanonicalSection::Introduction, &["introduction", "motivation"]),
    (
        CanonicalSection::RelatedWork,
        &["related work", "previous work", "prior work", "literature", "background", "related research"],
    ),
    (
        CanonicalSection::Evaluation,
        &["experiment", "result", "evaluation", "analysis", "performance"],
    ),
    (
        CanonicalSection::Conclusion,
        &["conclusion", "concluding", "future work", "summary", "discussion"],
    ),
    (
        CanonicalSection::Methods,
        &[
            "method", "approach", "model", "system", "architecture", "algorithm", "framework",
            "implementation", "formulation", "data", "corpus", "feature", "task", "setup",
        ],
    ),
];

impl CanonicalSection {
    pub const ALL: [CanonicalSection; 8] = [
        CanonicalSection::Abstract,
        CanonicalSection::Acknowledgments,
        CanonicalSection::Conclusion,
        CanonicalSection::Evaluation,
        CanonicalSection::Introduction,
        CanonicalSection::Methods,
        CanonicalSection::RelatedWork,
        CanonicalSection::Other,
    ];

    /// Case-insensitive keyword mapping from a raw header.
    pub fn from_header(header: &str) -> Self {
        let lower = header.to_lowercase();
        SECTION_KEYWORDS
            .iter()
            .find(|(_, keys)| keys.iter().any(|k| lower.contains(k)))
            .map(|(section, _)| *section)
            .unwrap_or(CanonicalSection::Other)
    }

    pub fn name(self) -> &'static str {
        match self {
            CanonicalSection::Abstract => "Abstract",
            CanonicalSection::Acknowledgments => "Acknowledgments",
            CanonicalSection::Conclusion => "Conclusion",
            CanonicalSection::Evaluation => "Evaluation",
            CanonicalSection::Introduction => "Introduction",
            CanonicalSection::Methods => "Methods",
            CanonicalSection::RelatedWork => "Related Work",
            CanonicalSection::Other => "Other",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for CanonicalSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawArticle {
    pub doc_id: String,
    pub body: String,
    pub has_abstract: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub label: Label,
    pub original_text: String,
}

impl Sentence {
    pub fn new(original_text: impl Into<String>, patterns: &PatternSet) -> Self {
        let original_text = original_text.into();
        let (text, label) = patterns.label_and_sanitize(&original_text);
        Self { text, label, original_text }
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }

    pub fn word_len(&self) -> usize {
        self.text.split_whitespace().count()
    }
}

/// A paragraph serializes as a bare array of sentences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Paragraph {
    pub sentences: Vec<Sentence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub header: String,
    pub canonical: CanonicalSection,
    pub paragraphs: Vec<Paragraph>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub sections: Vec<Section>,
}

/// A sentence viewed in global document order.
#[derive(Debug, Clone, Copy)]
pub struct SentenceRef<'a> {
    /// 1-based position in the document.
    pub index: usize,
    pub section: CanonicalSection,
    pub sentence: &'a Sentence,
}

impl Document {
    /// Sentences in global order: sections, then paragraphs, then sentences.
    pub fn sentences(&self) -> impl Iterator<Item = SentenceRef<'_>> + '_ {
        self.sections
            .iter()
            .flat_map(|sec| {
                sec.paragraphs
                    .iter()
                    .flat_map(move |p| p.sentences.iter().map(move |s| (sec.canonical, s)))
            })
            .enumerate()
            .map(|(i, (section, sentence))| SentenceRef { index: i + 1, section, sentence })
    }

    pub fn flat(&self) -> Vec<SentenceRef<'_>> {
        self.sentences().collect()
    }

    pub fn num_sentences(&self) -> usize {
        self.sections
            .iter()
            .flat_map(|s| &s.paragraphs)
            .map(|p| p.sentences.len())
            .sum()
    }

    pub fn num_paragraphs(&self) -> usize {
        self.sections.iter().map(|s| s.paragraphs.len()).sum()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.sentences().map(|s| s.sentence.label).collect()
    }

    pub fn sentence_mut(&mut self, index: usize) -> Option<&mut Sentence> {
        self.sections
            .iter_mut()
            .flat_map(|s| s.paragraphs.iter_mut())
            .flat_map(|p| p.sentences.iter_mut())
            .nth(index.checked_sub(1)?)
    }
}
