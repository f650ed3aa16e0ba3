use std::collections::HashSet;
use std::fs;
use std::path::Path;

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    segment_sentences, CanonicalSection, CorpusError, Document, Paragraph, PatternSet, RawArticle,
    Section, Sentence,
};
use crate::dataset::{compute_stats, CorpusStats};

const MAX_HEADER_WORDS: usize = 8;

/// A line that could be a section header: short and not sentence-terminated.
/// It only counts as a header when it forms a block of its own.
pub fn is_header_line(line: &str) -> bool {
    let line = line.trim();
    let words = line.split_whitespace().count();
    words > 0 && words <= MAX_HEADER_WORDS && !line.ends_with(['.', '?', '!'])
}

fn blocks(body: &str) -> Vec<Vec<&str>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for line in body.lines() {
        let line = line.trim();
        if line.is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Whether any header block in `body` maps to the Abstract bucket.
pub fn has_abstract_header(body: &str) -> bool {
    blocks(body).iter().any(|b| {
        b.len() == 1
            && is_header_line(b[0])
            && CanonicalSection::from_header(b[0]) == CanonicalSection::Abstract
    })
}

pub fn parse_document(raw: &RawArticle, patterns: &PatternSet) -> Result<Document, CorpusError> {
    let doc_id = raw.doc_id.clone();
    if raw.body.trim().is_empty() {
        return Err(CorpusError::EmptyDocument { doc_id });
    }
    if !raw.has_abstract {
        return Err(CorpusError::NoAbstract { doc_id });
    }

    let mut sections: Vec<Section> = Vec::new();
    let mut current = Section {
        header: String::new(),
        canonical: CanonicalSection::Other,
        paragraphs: Vec::new(),
    };
    for block in blocks(&raw.body) {
        if block.len() == 1 && is_header_line(block[0]) {
            let header = block[0].to_string();
            let next = Section {
                canonical: CanonicalSection::from_header(&header),
                header,
                paragraphs: Vec::new(),
            };
            let done = std::mem::replace(&mut current, next);
            if !done.paragraphs.is_empty() {
                sections.push(done);
            }
            continue;
        }
        let text = block.join(" ");
        let sentences: Vec<Sentence> = segment_sentences(&text)
            .into_iter()
            .map(|s| Sentence::new(s, patterns))
            .collect();
        if !sentences.is_empty() {
            current.paragraphs.push(Paragraph { sentences });
        }
    }
    if !current.paragraphs.is_empty() {
        sections.push(current);
    }
    if sections.is_empty() {
        return Err(CorpusError::NoSentences { doc_id });
    }
    Ok(Document { doc_id, sections })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub doc_id: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct BuiltCorpus {
    pub documents: Vec<Document>,
    pub stats: CorpusStats,
    pub skipped: Vec<SkipRecord>,
}

/// Parse and label every article, skipping (and recording) the ones that
/// cannot be used. Output order follows input order.
pub fn build_corpus<I>(inputs: I, patterns: &PatternSet) -> Result<BuiltCorpus, CorpusError>
where
    I: IntoIterator<Item = RawArticle>,
{
    let articles: Vec<RawArticle> = inputs.into_iter().collect();
    if articles.is_empty() {
        return Err(CorpusError::NoInput);
    }
    let mut seen = HashSet::new();
    let duplicate: Vec<bool> = articles.iter().map(|a| !seen.insert(a.doc_id.clone())).collect();

    let results: Vec<Result<Document, SkipRecord>> = articles
        .par_iter()
        .zip(duplicate.par_iter())
        .map(|(raw, &dup)| {
            let skip = |reason: String| SkipRecord { doc_id: raw.doc_id.clone(), reason };
            if raw.doc_id.trim().is_empty() {
                return Err(skip("empty doc_id".into()));
            }
            if dup {
                return Err(skip("duplicate doc_id".into()));
            }
            parse_document(raw, patterns).map_err(|e| skip(e.to_string()))
        })
        .collect();

    let mut documents = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(doc) => {
                debug!("parsed {} ({} sentences)", doc.doc_id, doc.num_sentences());
                documents.push(doc);
            }
            Err(s) => {
                warn!("skipping {:?}: {}", s.doc_id, s.reason);
                skipped.push(s);
            }
        }
    }
    if documents.is_empty() {
        return Err(CorpusError::AllDocumentsSkipped { skipped: skipped.len() });
    }
    let stats = compute_stats(&documents).expect("nonempty corpus");
    Ok(BuiltCorpus { documents, stats, skipped })
}

/// Parse one article file: `#DOC <id>` on the first line, an optional
/// `#ABSTRACT` marker line, then the body.
pub fn read_article_file(path: &Path) -> Result<RawArticle, CorpusError> {
    let text = fs::read_to_string(path)?;
    parse_article_text(&text).map_err(|message| CorpusError::Input {
        path: path.display().to_string(),
        message,
    })
}

fn parse_article_text(text: &str) -> Result<RawArticle, String> {
    let mut lines = text.lines();
    let first = lines.next().unwrap_or_default();
    let doc_id = first
        .strip_prefix("#DOC")
        .map(str::trim)
        .filter(|id| !id.is_empty())
        .ok_or_else(|| "first line must be `#DOC <doc_id>`".to_string())?
        .to_string();
    let mut marker = false;
    let mut body = String::new();
    for line in lines {
        if line.trim() == "#ABSTRACT" {
            marker = true;
            continue;
        }
        body.push_str(line);
        body.push('\n');
    }
    let has_abstract = marker || has_abstract_header(&body);
    Ok(RawArticle { doc_id, body, has_abstract })
}

#[derive(Deserialize)]
struct JsonArticle {
    doc_id: String,
    body: String,
    #[serde(default)]
    has_abstract: Option<bool>,
}

/// Load articles from a directory of article files (sorted by file name) or
/// from a JSON-lines file with `{doc_id, body, has_abstract}` records.
pub fn read_articles(path: &Path) -> Result<Vec<RawArticle>, CorpusError> {
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| {
                p.is_file()
                    && !p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with('.'))
            })
            .collect();
        files.sort();
        return files.iter().map(|p| read_article_file(p)).collect();
    }
    let is_jsonl = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("jsonl") || e.eq_ignore_ascii_case("json"));
    if !is_jsonl {
        return Ok(vec![read_article_file(path)?]);
    }
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonArticle = serde_json::from_str(line).map_err(|e| CorpusError::Input {
            path: format!("{}:{}", path.display(), i + 1),
            message: e.to_string(),
        })?;
        let has_abstract = rec.has_abstract.unwrap_or_else(|| has_abstract_header(&rec.body));
        out.push(RawArticle { doc_id: rec.doc_id, body: rec.body, has_abstract });
    }
    Ok(out)
}
