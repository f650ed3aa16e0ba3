use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::tokenize::tokenize;
use crate::corpus::Document;

pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";
pub const SEP_TOKEN: &str = "<sep>";
pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;
pub const SEP_ID: u32 = 2;

/// Frozen token-to-id map. Ids 0, 1 and 2 are the padding, unknown and
/// separator tokens; the rest follow descending training frequency, ties
/// broken lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl From<Vec<String>> for Vocabulary {
    fn from(tokens: Vec<String>) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Self { tokens, index }
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.tokens
    }
}

impl Vocabulary {
    /// Count tokens over sentence texts and section names of `documents`
    /// and keep the `max_size` most frequent (specials included).
    pub fn build<'a>(documents: impl IntoIterator<Item = &'a Document>, max_size: usize) -> Self {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for doc in documents {
            for s in doc.sentences() {
                for t in tokenize(&s.sentence.text) {
                    *counts.entry(t).or_default() += 1;
                }
            }
            for section in &doc.sections {
                for t in tokenize(section.canonical.name()) {
                    *counts.entry(t).or_default() += 1;
                }
            }
        }
        for special in [PAD_TOKEN, UNK_TOKEN, SEP_TOKEN] {
            counts.remove(special);
        }
        let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut tokens: Vec<String> = [PAD_TOKEN, UNK_TOKEN, SEP_TOKEN].map(String::from).into();
        tokens.extend(ranked.into_iter().map(|(t, _)| t).take(max_size.saturating_sub(3)));
        tokens.into()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> u32 {
        self.index.get(token).copied().unwrap_or(UNK_ID)
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Tokenize and map to ids, keeping at most `max_tokens`.
    pub fn encode(&self, text: &str, max_tokens: usize) -> Vec<u32> {
        tokenize(text).iter().take(max_tokens).map(|t| self.id(t)).collect()
    }

    /// Hex SHA-256 over the tokens in id order, newline separated.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for t in &self.tokens {
            h.update(t.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::test_doc;

    #[test]
    fn specials_and_order() {
        let doc = test_doc("d", &[("Introduction", &["b a b", "c b a"])]);
        let v = Vocabulary::build([&doc], 100);
        assert_eq!(&v.tokens()[..3], [PAD_TOKEN, UNK_TOKEN, SEP_TOKEN]);
        assert_eq!(&v.tokens()[3..6], ["b", "a", "c"]);
        assert!(v.contains("introduction"));
        assert_eq!(v.id("zzz"), UNK_ID);
        assert_eq!(v.encode("B a zzz", 64), vec![3, 4, UNK_ID]);
    }

    #[test]
    fn size_cap_and_hash() {
        let doc = test_doc("d", &[("Intro", &["a b c d e f"])]);
        let v = Vocabulary::build([&doc], 5);
        assert_eq!(v.len(), 5);
        let again = Vocabulary::build([&doc], 5);
        assert_eq!(v.hash(), again.hash());
        assert_ne!(v.hash(), Vocabulary::build([&doc], 6).hash());
    }

    #[test]
    fn serde_round_trip() {
        let doc = test_doc("d", &[("Methods", &["x y"])]);
        let v = Vocabulary::build([&doc], 100);
        let back: Vocabulary = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(back, v);
    }
}
