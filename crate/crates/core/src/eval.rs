//! Cite-class precision/recall/F1, weighted F1 and per-section breakdowns.
//!
//! The cite label is the positive class. Any ratio with a zero denominator
//! is reported as 0.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CanonicalSection, Label};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum EvalError {
    #[error("predictions ({preds}) and gold labels ({golds}) differ in length")]
    LengthMismatch { preds: usize, golds: usize },
    #[error("no labels to evaluate")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a Label, &'a Label)>) -> Self {
        let mut c = Confusion::default();
        for (p, g) in pairs {
            match (p.is_cite(), g.is_cite()) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of sentences in the bucket.
    pub support: u64,
    /// Number of gold cite sentences in the bucket.
    pub cite_support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(flatten)]
    pub confusion: Confusion,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// F1 with no-cite as the positive class.
    pub f1_no_cite: f64,
    pub weighted_f1: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_section: BTreeMap<CanonicalSection, SectionMetrics>,
}

impl EvalReport {
    pub fn from_confusion(c: Confusion) -> Self {
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        let f1 = harmonic(precision, recall);
        let p_n = ratio(c.tn, c.tn + c.fn_);
        let r_n = ratio(c.tn, c.tn + c.fp);
        let f1_no_cite = harmonic(p_n, r_n);
        let support_c = c.tp + c.fn_;
        let support_n = c.tn + c.fp;
        let weighted_f1 = if c.total() == 0 {
            0.0
        } else {
            (support_c as f64 * f1 + support_n as f64 * f1_no_cite) / c.total() as f64
        };
        Self { confusion: c, precision, recall, f1, f1_no_cite, weighted_f1, per_section: BTreeMap::new() }
    }

    pub fn section_metrics(&self) -> SectionMetrics {
        SectionMetrics {
            precision: self.precision,
            recall: self.recall,
            f1: self.f1,
            support: self.confusion.total(),
            cite_support: self.confusion.tp + self.confusion.fn_,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned-column text table: the overall row, then one row per section.
    pub fn to_table(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<16} {:>7} {:>7} {:>7} {:>7} {:>8}", "Model", "P", "R", "F1", "W-F1", "Support");
        let _ = writeln!(
            out,
            "{:<16} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>8}",
            name,
            self.precision,
            self.recall,
            self.f1,
            self.weighted_f1,
            self.confusion.total()
        );
        if !self.per_section.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "{:<16} {:>7} {:>7} {:>7} {:>8}", "Section", "P", "R", "F1", "Support");
            for (section, m) in &self.per_section {
                let _ = writeln!(
                    out,
                    "{:<16} {:>7.3} {:>7.3} {:>7.3} {:>8}",
                    section.name(),
                    m.precision,
                    m.recall,
                    m.f1,
                    m.support
                );
            }
        }
        out
    }

    /// CSV with a header row; the overall scores appear under section `ALL`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,precision,recall,f1,support\n");
        let _ = writeln!(out, "ALL,{},{},{},{}", self.precision, self.recall, self.f1, self.confusion.total());
        for (section, m) in &self.per_section {
            let _ = writeln!(out, "{},{},{},{},{}", section.name(), m.precision, m.recall, m.f1, m.support);
        }
        out
    }
}

pub fn compute_metrics(preds: &[Label], golds: &[Label]) -> Result<EvalReport, EvalError> {
    if preds.len() != golds.len() {
        return Err(EvalError::LengthMismatch { preds: preds.len(), golds: golds.len() });
    }
    if preds.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    Ok(EvalReport::from_confusion(Confusion::from_pairs(preds.iter().zip(golds))))
}

/// Metrics per canonical section; buckets without sentences are absent.
pub fn per_section_metrics(
    preds: &[Label],
    golds: &[Label],
    sections: &[CanonicalSection],
) -> Result<BTreeMap<CanonicalSection, SectionMetrics>, EvalError> {
    if preds.len() != golds.len() || preds.len() != sections.len() {
        return Err(EvalError::LengthMismatch { preds: preds.len(), golds: golds.len().min(sections.len()) });
    }
    let mut buckets: BTreeMap<CanonicalSection, Confusion> = BTreeMap::new();
    for ((p, g), s) in preds.iter().zip(golds).zip(sections) {
        let c = buckets.entry(*s).or_default();
        match (p.is_cite(), g.is_cite()) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(buckets
        .into_iter()
        .map(|(s, c)| (s, EvalReport::from_confusion(c).section_metrics()))
        .collect())
}

/// Full report including the per-section map.
pub fn evaluate(preds: &[Label], golds: &[Label], sections: &[CanonicalSection]) -> Result<EvalReport, EvalError> {
    let mut report = compute_metrics(preds, golds)?;
    report.per_section = per_section_metrics(preds, golds, sections)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDelta {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub weighted_f1: f64,
    pub per_section: BTreeMap<CanonicalSection, MetricDelta>,
    pub notes: Vec<String>,
}

/// Differences `b - a`, overall and for every section present in both.
pub fn compare_reports(a: &EvalReport, b: &EvalReport) -> DeltaReport {
    let mut per_section = BTreeMap::new();
    let mut notes = Vec::new();
    for (section, ma) in &a.per_section {
        match b.per_section.get(section) {
            Some(mb) => {
                per_section.insert(
                    *section,
                    MetricDelta { precision: mb.precision - ma.precision, recall: mb.recall - ma.recall, f1: mb.f1 - ma.f1 },
                );
            }
            None => notes.push(format!("section {} missing from second report", section.name())),
        }
    }
    for section in b.per_section.keys().filter(|s| !a.per_section.contains_key(s)) {
        notes.push(format!("section {} missing from first report", section.name()));
    }
    DeltaReport {
        precision: b.precision - a.precision,
        recall: b.recall - a.recall,
        f1: b.f1 - a.f1,
        weighted_f1: b.weighted_f1 - a.weighted_f1,
        per_section,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Cite as C, NoCite as N};

    #[test]
    fn hand_counted_case() {
        let r = compute_metrics(&[C, C, N, N], &[C, N, C, N]).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (0.5, 0.5, 0.5));
        assert_eq!(r.f1_no_cite, 0.5);
        assert_eq!(r.weighted_f1, 0.5);
    }

    #[test]
    fn identity() {
        let g = [C, N, N, C, N];
        let r = compute_metrics(&g, &g).unwrap();
        assert_eq!((r.precision, r.recall, r.f1, r.weighted_f1), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn all_no_cite_predictor() {
        let g = [C, N, N, N];
        let r = compute_metrics(&[N; 4], &g).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
        assert!((r.weighted_f1 - 0.75 * r.f1_no_cite).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(compute_metrics(&[C], &[C, N]), Err(EvalError::LengthMismatch { preds: 1, golds: 2 }));
        assert_eq!(compute_metrics(&[], &[]), Err(EvalError::EmptyInput));
        assert!(per_section_metrics(&[C], &[C], &[]).is_err());
    }

    #[test]
    fn per_section_matches_subset_recomputation() {
        use CanonicalSection::*;
        let preds = [C, N, C, C, N, N];
        let golds = [C, C, N, C, N, C];
        let secs = [Introduction, Introduction, Methods, Methods, Methods, Introduction];
        let m = per_section_metrics(&preds, &golds, &secs).unwrap();
        assert_eq!(m.len(), 2);
        for (section, got) in &m {
            let (p, g): (Vec<Label>, Vec<Label>) = preds
                .iter()
                .zip(&golds)
                .zip(&secs)
                .filter(|(_, s)| *s == section)
                .map(|((p, g), _)| (*p, *g))
                .unzip();
            let want = compute_metrics(&p, &g).unwrap();
            assert_eq!((got.precision, got.recall, got.f1), (want.precision, want.recall, want.f1));
            assert_eq!(got.support, p.len() as u64);
        }
    }

    #[test]
    fn single_section_equals_global() {
        let preds = [C, N, C];
        let golds = [C, C, N];
        let r = evaluate(&preds, &golds, &[CanonicalSection::Abstract; 3]).unwrap();
        assert_eq!(r.per_section.len(), 1);
        assert_eq!(r.per_section[&CanonicalSection::Abstract], r.section_metrics());
    }

    #[test]
    fn deltas() {
        let secs = [CanonicalSection::Abstract, CanonicalSection::Methods];
        let a = evaluate(&[C, N], &[C, C], &secs).unwrap();
        let same = compare_reports(&a, &a);
        assert_eq!((same.precision, same.recall, same.f1, same.weighted_f1), (0.0, 0.0, 0.0, 0.0));
        assert!(same.per_section.values().all(|d| d.f1 == 0.0));

        let b = evaluate(&[C, C], &[C, C], &secs).unwrap();
        let d = compare_reports(&a, &b);
        assert_eq!(d.recall, 1.0 - 0.5);
        assert_eq!(d.per_section[&CanonicalSection::Methods].f1, 1.0);

        let c = evaluate(&[C], &[C], &[CanonicalSection::Abstract]).unwrap();
        let d = compare_reports(&a, &c);
        assert!(!d.per_section.contains_key(&CanonicalSection::Methods));
        assert_eq!(d.notes.len(), 1);
    }

    #[test]
    fn serializations() {
        let r = evaluate(&[C, N], &[C, C], &[CanonicalSection::RelatedWork; 2]).unwrap();
        let back: EvalReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"Related Work\""));
        assert!(r.to_table("SC").contains("Related Work"));
        assert_eq!(r.to_csv().lines().count(), 3);
    }
}
