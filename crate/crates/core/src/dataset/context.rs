use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::corpus::{CanonicalSection, Document};

/// Separator between the fields of a rendered context.
pub const CONTEXT_SEPARATOR: &str = " [SEP] ";

/// Previous, current and next sentence of a document position, optionally
/// prefixed with the canonical section of the current sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextString {
    pub section_header: Option<CanonicalSection>,
    pub prev: String,
    pub current: String,
    pub next: String,
}

impl ContextString {
    /// Fields in rendering order; the lowercased section name comes first
    /// when present.
    pub fn fields(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(4);
        if let Some(section) = self.section_header {
            out.push(section.name().to_lowercase());
        }
        out.extend([self.prev.clone(), self.current.clone(), self.next.clone()]);
        out
    }

    pub fn text(&self) -> String {
        self.fields().join(CONTEXT_SEPARATOR)
    }
}

/// Context of sentence `index` (1-based). Neighbours follow global document
/// order across paragraph and section boundaries; missing ones are empty.
pub fn build_context(doc: &Document, index: usize, include_section: bool) -> Result<ContextString, DatasetError> {
    let flat = doc.flat();
    let n = flat.len();
    if index == 0 || index > n {
        return Err(DatasetError::IndexOutOfRange { index, len: n });
    }
    let text_at = |i: usize| -> String {
        if i >= 1 && i <= n {
            flat[i - 1].sentence.text.clone()
        } else {
            String::new()
        }
    };
    Ok(ContextString {
        section_header: include_section.then_some(flat[index - 1].section),
        prev: text_at(index - 1),
        current: text_at(index),
        next: text_at(index + 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::test_doc;

    #[test]
    fn middle_sentence() {
        let doc = test_doc("d", &[("Related Work", &["A", "B", "C"])]);
        let c = build_context(&doc, 2, false).unwrap();
        assert_eq!(c.text(), "A [SEP] B [SEP] C");
    }

    #[test]
    fn first_sentence_has_empty_prev() {
        let doc = test_doc("d", &[("Related Work", &["A", "B", "C"])]);
        assert_eq!(build_context(&doc, 1, false).unwrap().text(), " [SEP] A [SEP] B");
        assert_eq!(build_context(&doc, 3, false).unwrap().text(), "B [SEP] C [SEP] ");
    }

    #[test]
    fn section_prefix() {
        let doc = test_doc("d", &[("Related Work", &["A", "B", "C"])]);
        let c = build_context(&doc, 2, true).unwrap();
        assert_eq!(c.text(), "related work [SEP] A [SEP] B [SEP] C");
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ContextString>(&json).unwrap(), c);
    }

    #[test]
    fn crosses_section_boundaries() {
        let doc = test_doc("d", &[("Introduction", &["A"]), ("Methods", &["B", "C"])]);
        let c = build_context(&doc, 2, true).unwrap();
        assert_eq!(c.prev, "A");
        assert_eq!(c.section_header, Some(CanonicalSection::Methods));
    }

    #[test]
    fn out_of_range() {
        let doc = test_doc("d", &[("Methods", &["A"])]);
        assert!(matches!(build_context(&doc, 0, false), Err(DatasetError::IndexOutOfRange { .. })));
        assert!(matches!(build_context(&doc, 2, false), Err(DatasetError::IndexOutOfRange { .. })));
    }
}
