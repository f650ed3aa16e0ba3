//! Generated corpora with known label structure, for sanity checks of the
//! training loop and of the formulations.

use crate::corpus::{CanonicalSection, Document, Label, Paragraph, Section, Sentence};
use crate::rng::{self, Rng};

const ONSETS: [&str; 10] = ["b", "d", "k", "l", "m", "r", "s", "t", "v", "z"];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
const SECTIONS: [&str; 4] = ["Introduction", "Related Work", "Methods", "Results"];

/// Token that marks the sentence after it as citing in the context corpus.
pub const CONTEXT_MARKER: &str = "notably";
/// Tokens that make a sentence citing in the overfit corpus.
pub const OVERFIT_CUES: [&str; 3] = ["previously", "reported", "proposed"];

/// Two-syllable filler words that never coincide with a cue or marker.
pub fn filler_words(count: usize) -> Vec<String> {
    let syllables: Vec<String> = ONSETS.iter().flat_map(|o| VOWELS.iter().map(move |v| format!("{o}{v}"))).collect();
    syllables
        .iter()
        .flat_map(|a| syllables.iter().map(move |b| format!("{a}{b}")))
        .take(count)
        .collect()
}

fn pick<'a>(rng: &mut Rng, items: &'a [String]) -> &'a str {
    &items[rng::uniform_index(rng, items.len() as u64) as usize]
}

fn range(rng: &mut Rng, lo: usize, hi: usize) -> usize {
    lo + rng::uniform_index(rng, (hi - lo + 1) as u64) as usize
}

fn sentence_text(rng: &mut Rng, filler: &[String], extra: Option<&str>) -> String {
    let len = range(rng, 5, 12);
    let mut words: Vec<&str> = (0..len).map(|_| pick(rng, filler)).collect();
    if let Some(word) = extra {
        let at = rng::uniform_index(rng, len as u64 + 1) as usize;
        words.insert(at, word);
    }
    let mut text = words.join(" ");
    if let Some(first) = text.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    text.push('.');
    text
}

fn assemble(doc_id: String, sentences: Vec<Sentence>, rng: &mut Rng) -> Document {
    let n_sections = range(rng, 1, SECTIONS.len().min(sentences.len()).max(1));
    let per = sentences.len().div_ceil(n_sections);
    let sections = sentences
        .chunks(per.max(1))
        .zip(SECTIONS)
        .map(|(chunk, header)| Section {
            header: header.to_string(),
            canonical: CanonicalSection::from_header(header),
            paragraphs: vec![Paragraph { sentences: chunk.to_vec() }],
        })
        .collect();
    Document { doc_id, sections }
}

fn sentence(text: String, label: Label) -> Sentence {
    Sentence { original_text: text.clone(), text, label }
}

/// Documents of 8 to 12 sentences where a sentence cites exactly when it
/// contains one of [`OVERFIT_CUES`] (about 30% do).
pub fn overfit_corpus(n_docs: usize, seed: u64) -> Vec<Document> {
    let mut rng = rng::seeded(seed);
    let filler = filler_words(200);
    let cues: Vec<String> = OVERFIT_CUES.iter().map(|s| s.to_string()).collect();
    (0..n_docs)
        .map(|d| {
            let n = range(&mut rng, 8, 12);
            let sentences = (0..n)
                .map(|_| {
                    let cite = rng::unit_f64(&mut rng) < 0.3;
                    let cue = cite.then(|| pick(&mut rng, &cues).to_string());
                    let text = sentence_text(&mut rng, &filler, cue.as_deref());
                    sentence(text, if cite { Label::Cite } else { Label::NoCite })
                })
                .collect();
            assemble(format!("overfit-{d:04}"), sentences, &mut rng)
        })
        .collect()
}

/// Parameters of [`context_corpus`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContextCorpusConfig {
    pub n_docs: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    /// Probability that a sentence carries [`CONTEXT_MARKER`].
    pub marker_rate: f64,
    /// Probability that a label is flipped after generation.
    pub label_noise: f64,
    pub filler_size: usize,
}

impl Default for ContextCorpusConfig {
    fn default() -> Self {
        Self { n_docs: 500, min_sentences: 8, max_sentences: 16, marker_rate: 0.25, label_noise: 0.1, filler_size: 50 }
    }
}

/// Documents where sentence `i` cites exactly when sentence `i-1` carries
/// [`CONTEXT_MARKER`], before label noise. A sentence's own words carry no
/// information about its label.
pub fn context_corpus(config: &ContextCorpusConfig, seed: u64) -> Vec<Document> {
    let mut rng = rng::seeded(seed);
    let filler = filler_words(config.filler_size);
    (0..config.n_docs)
        .map(|d| {
            let n = range(&mut rng, config.min_sentences, config.max_sentences);
            let mut prev_marked = false;
            let sentences = (0..n)
                .map(|_| {
                    let marked = rng::unit_f64(&mut rng) < config.marker_rate;
                    let text = sentence_text(&mut rng, &filler, marked.then_some(CONTEXT_MARKER));
                    let flip = rng::unit_f64(&mut rng) < config.label_noise;
                    let cite = prev_marked != flip;
                    prev_marked = marked;
                    sentence(text, if cite { Label::Cite } else { Label::NoCite })
                })
                .collect();
            assemble(format!("context-{d:04}"), sentences, &mut rng)
        })
        .collect()
}
