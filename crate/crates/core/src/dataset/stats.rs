use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::corpus::Document;

/// Corpus-level counts. Character and word totals are kept exactly; the
/// averages are derived from them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub articles: u64,
    pub sections: u64,
    pub paragraphs: u64,
    pub sentences: u64,
    pub sentences_without_citation: u64,
    pub sentences_with_citation: u64,
    pub total_chars: u64,
    pub total_words: u64,
}

impl CorpusStats {
    pub fn of_document(doc: &Document) -> Self {
        let mut s = CorpusStats {
            articles: 1,
            sections: doc.sections.len() as u64,
            paragraphs: doc.num_paragraphs() as u64,
            ..Default::default()
        };
        for r in doc.sentences() {
            s.sentences += 1;
            if r.sentence.label.is_cite() {
                s.sentences_with_citation += 1;
            } else {
                s.sentences_without_citation += 1;
            }
            s.total_chars += r.sentence.char_len() as u64;
            s.total_words += r.sentence.word_len() as u64;
        }
        s
    }

    pub fn avg_chars_per_sentence(&self) -> f64 {
        ratio(self.total_chars, self.sentences)
    }

    pub fn avg_words_per_sentence(&self) -> f64 {
        ratio(self.total_words, self.sentences)
    }

    pub fn citation_rate(&self) -> f64 {
        ratio(self.sentences_with_citation, self.sentences)
    }

    /// JSON object with the derived averages alongside the raw counts.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain struct");
        let obj = v.as_object_mut().expect("object");
        obj.insert("avg_chars_per_sentence".into(), self.avg_chars_per_sentence().into());
        obj.insert("avg_words_per_sentence".into(), self.avg_words_per_sentence().into());
        obj.insert("citation_rate".into(), self.citation_rate().into());
        v
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Add for CorpusStats {
    type Output = CorpusStats;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for CorpusStats {
    fn add_assign(&mut self, rhs: Self) {
        self.articles += rhs.articles;
        self.sections += rhs.sections;
        self.paragraphs += rhs.paragraphs;
        self.sentences += rhs.sentences;
        self.sentences_without_citation += rhs.sentences_without_citation;
        self.sentences_with_citation += rhs.sentences_with_citation;
        self.total_chars += rhs.total_chars;
        self.total_words += rhs.total_words;
    }
}

pub fn compute_stats<'a, I>(documents: I) -> Result<CorpusStats, DatasetError>
where
    I: IntoIterator<Item = &'a Document>,
{
    let mut any = false;
    let total = documents.into_iter().fold(CorpusStats::default(), |acc, d| {
        any = true;
        acc + CorpusStats::of_document(d)
    });
    if !any {
        return Err(DatasetError::EmptyCorpus);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;
    use crate::dataset::test_doc;

    #[test]
    fn one_sentence_averages() {
        let doc = test_doc("d", &[("Abstract", &["ab cd"])]);
        let s = compute_stats([&doc]).unwrap();
        assert_eq!(s.avg_chars_per_sentence(), 5.0);
        assert_eq!(s.avg_words_per_sentence(), 2.0);
        assert_eq!(s.sentences, s.sentences_with_citation + s.sentences_without_citation);
    }

    #[test]
    fn hand_counts() {
        let mut a = test_doc("a", &[("Abstract", &["x", "y", "z"]), ("Methods", &["u"])]);
        let mut b = test_doc("b", &[("Abstract", &["p", "q", "r"])]);
        a.sentence_mut(2).unwrap().label = Label::Cite;
        b.sentence_mut(3).unwrap().label = Label::Cite;
        let s = compute_stats([&a, &b]).unwrap();
        assert_eq!(s.articles, 2);
        assert_eq!(s.sections, 3);
        assert_eq!(s.sentences, 7);
        assert_eq!(s.sentences_with_citation, 2);
        assert_eq!(s.sentences_without_citation, 5);
    }

    #[test]
    fn empty_corpus() {
        assert!(matches!(compute_stats(std::iter::empty()), Err(DatasetError::EmptyCorpus)));
    }

    #[test]
    fn aggregation_is_order_independent() {
        let a = CorpusStats::of_document(&test_doc("a", &[("Abstract", &["x y", "z"])]));
        let b = CorpusStats::of_document(&test_doc("b", &[("Methods", &["longer sentence here"])]));
        assert_eq!(a + b, b + a);
    }
}
