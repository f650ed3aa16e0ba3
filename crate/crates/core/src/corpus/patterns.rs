//! Citation pattern sets.
//!
//! A pattern set is an ordered list of named regular expressions loaded from a
//! small text format (see `patterns/default.txt`). Fragments declared with
//! `@name = ...` are spliced into later lines wherever `{@name}` appears.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;

use super::{CorpusError, Label};

/// Text of the pattern set shipped with the crate.
pub const DEFAULT_PATTERNS: &str = include_str!("../../patterns/default.txt");

/// Version of [`DEFAULT_PATTERNS`]; bump whenever the file changes.
pub const DEFAULT_PATTERNS_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct CitationPattern {
    pub name: String,
    pub regex: Regex,
}

#[derive(Debug, Clone)]
pub struct PatternSet {
    patterns: Vec<CitationPattern>,
    empty_brackets: Regex,
    space_before_punct: Regex,
}

impl PatternSet {
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut fragments: HashMap<String, String> = HashMap::new();
        let mut patterns = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((name, body)) = line.split_once('=') else {
                return Err(CorpusError::Pattern {
                    line: lineno + 1,
                    message: "expected `name = regex`".into(),
                });
            };
            let name = name.trim();
            let body = expand(body.trim(), &fragments).map_err(|message| CorpusError::Pattern {
                line: lineno + 1,
                message,
            })?;
            if let Some(fragment) = name.strip_prefix('@') {
                fragments.insert(fragment.to_string(), body);
                continue;
            }
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(CorpusError::Pattern {
                    line: lineno + 1,
                    message: format!("bad pattern name {name:?}"),
                });
            }
            let regex = Regex::new(&body).map_err(|e| CorpusError::Pattern {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            patterns.push(CitationPattern { name: name.to_string(), regex });
        }
        if patterns.is_empty() {
            return Err(CorpusError::Pattern { line: 0, message: "pattern set is empty".into() });
        }
        Ok(Self {
            patterns,
            empty_brackets: Regex::new(r"\(\s*[,;]?\s*\)|\[\s*[,;]?\s*\]").unwrap(),
            space_before_punct: Regex::new(r"\s+([.,;:!?])").unwrap(),
        })
    }

    /// The shipped pattern set, compiled once per process.
    pub fn default_set() -> &'static PatternSet {
        static SET: OnceLock<PatternSet> = OnceLock::new();
        SET.get_or_init(|| PatternSet::parse(DEFAULT_PATTERNS).expect("default patterns compile"))
    }

    pub fn patterns(&self) -> &[CitationPattern] {
        &self.patterns
    }

    /// Names of the patterns that match anywhere in `text`.
    pub fn matching(&self, text: &str) -> Vec<&str> {
        self.patterns
            .iter()
            .filter(|p| p.regex.is_match(text))
            .map(|p| p.name.as_str())
            .collect()
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.patterns.iter().any(|p| p.regex.is_match(text))
    }

    /// Label a sentence and strip every citation span from it.
    ///
    /// Sentences without any match are returned verbatim. Otherwise matches are
    /// removed until none remain, then empty brackets left behind are dropped
    /// and whitespace is collapsed.
    pub fn label_and_sanitize(&self, sentence: &str) -> (String, Label) {
        if !self.is_match(sentence) {
            return (sentence.to_string(), Label::NoCite);
        }
        let mut text = sentence.to_string();
        // Removal can splice two fragments into a new match ("[1[2]]").
        while self.is_match(&text) {
            for p in &self.patterns {
                if p.regex.is_match(&text) {
                    text = p.regex.replace_all(&text, " ").into_owned();
                }
            }
        }
        loop {
            let next = self.empty_brackets.replace_all(&text, " ");
            if next == text {
                break;
            }
            text = next.into_owned();
        }
        let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ");
        let clean = self.space_before_punct.replace_all(&collapsed, "$1").into_owned();
        (clean, Label::Cite)
    }
}

fn expand(body: &str, fragments: &HashMap<String, String>) -> Result<String, String> {
    let mut out = String::with_capacity(body.len());
    let mut rest = body;
    while let Some(start) = rest.find("{@") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let end = after.find('}').ok_or_else(|| "unterminated fragment reference".to_string())?;
        let name = &after[..end];
        let value = fragments.get(name).ok_or_else(|| format!("unknown fragment @{name}"))?;
        out.push_str(value);
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set() -> &'static PatternSet {
        PatternSet::default_set()
    }

    #[test]
    fn trailing_author_year_citation() {
        let (clean, label) = set().label_and_sanitize(
            "Our parser reuses the tokenizer of an open toolkit that runs on top of a larger NLP framework (Author et al., 2009).",
        );
        assert_eq!(label, Label::Cite);
        assert_eq!(clean, "Our parser reuses the tokenizer of an open toolkit that runs on top of a larger NLP framework.");
    }

    #[test]
    fn uncited_sentence_is_untouched() {
        let s = "Rule-based taggers have been built for Estonian, Welsh, Korean and Thai";
        assert_eq!(set().label_and_sanitize(s), (s.to_string(), Label::NoCite));
    }

    #[test]
    fn bracketed_numeric_removal() {
        assert_eq!(
            set().label_and_sanitize("as shown in [3, 7] and [12]"),
            ("as shown in and".to_string(), Label::Cite)
        );
    }

    #[test]
    fn spliced_match_is_removed() {
        let (clean, label) = set().label_and_sanitize("odd [1[2]] nesting");
        assert_eq!(label, Label::Cite);
        assert!(!set().is_match(&clean), "{clean}");
    }

    #[test]
    fn dangling_parentheses_are_dropped() {
        let (clean, _) = set().label_and_sanitize("prior systems ([4]; [5]) did this.");
        assert_eq!(clean, "prior systems did this.");
    }

    #[test]
    fn fragments_expand_and_errors_carry_line_numbers() {
        let ok = PatternSet::parse("@n = \\d+\nnum = \\[{@n}\\]\n").unwrap();
        assert_eq!(ok.patterns()[0].regex.as_str(), "\\[\\d+\\]");
        match PatternSet::parse("# c\nx = {@missing}") {
            Err(CorpusError::Pattern { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(PatternSet::parse("bad = (").is_err());
        assert!(PatternSet::parse("# nothing\n").is_err());
    }
}
