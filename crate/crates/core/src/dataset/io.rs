//! On-disk dataset formats.
//!
//! A dataset file is JSON lines: a header object on the first line, then one
//! document per line. A split manifest is a single JSON object.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DatasetError, SplitAssignment, SplitRatios};
use crate::corpus::Document;
use crate::provenance::{RunConfig, TOOL_VERSION};
use crate::rng::SHUFFLE_VERSION;

pub const DATASET_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
const DATASET_FORMAT: &str = "citeworthy-dataset";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub format: String,
    pub schema_version: u32,
    pub tool_version: String,
    #[serde(default)]
    pub run_config: RunConfig,
}

impl DatasetHeader {
    pub fn new(run_config: RunConfig) -> Self {
        Self {
            format: DATASET_FORMAT.into(),
            schema_version: DATASET_SCHEMA_VERSION,
            tool_version: TOOL_VERSION.into(),
            run_config,
        }
    }
}

fn io_err(path: &Path, line: usize, e: impl ToString) -> DatasetError {
    DatasetError::Io { path: path.display().to_string(), line, message: e.to_string() }
}

pub fn write_dataset(path: &Path, documents: &[Document], header: &DatasetHeader) -> Result<(), DatasetError> {
    let file = File::create(path).map_err(|e| io_err(path, 0, e))?;
    let mut w = BufWriter::new(file);
    let mut write_line = |value: String| -> Result<(), DatasetError> {
        w.write_all(value.as_bytes()).and_then(|_| w.write_all(b"\n")).map_err(|e| io_err(path, 0, e))
    };
    write_line(serde_json::to_string(header).expect("header serializes"))?;
    for doc in documents {
        write_line(serde_json::to_string(doc).expect("document serializes"))?;
    }
    w.flush().map_err(|e| io_err(path, 0, e))
}

/// Read a dataset file. A header with another schema version is rejected;
/// malformed lines report their 1-based line number.
pub fn read_dataset(path: &Path) -> Result<(DatasetHeader, Vec<Document>), DatasetError> {
    let file = File::open(path).map_err(|e| io_err(path, 0, e))?;
    let mut lines = BufReader::new(file).lines();
    let first = lines
        .next()
        .ok_or_else(|| io_err(path, 1, "missing header line"))?
        .map_err(|e| io_err(path, 1, e))?;
    let raw: serde_json::Value = serde_json::from_str(&first).map_err(|e| io_err(path, 1, e))?;
    let found = raw.get("schema_version").map(|v| match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    });
    if found.as_deref() != Some(&DATASET_SCHEMA_VERSION.to_string()) {
        return Err(DatasetError::SchemaMismatch {
            expected: DATASET_SCHEMA_VERSION,
            found: found.unwrap_or_else(|| "missing".into()),
        });
    }
    let header: DatasetHeader = serde_json::from_value(raw).map_err(|e| io_err(path, 1, e))?;
    let mut documents = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| io_err(path, lineno, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| io_err(path, lineno, e))?;
        documents.push(doc);
    }
    Ok((header, documents))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub schema_version: u32,
    pub shuffle_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub ratios: SplitRatios,
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
    #[serde(default)]
    pub run_config: RunConfig,
}

impl SplitManifest {
    pub fn new(split: SplitAssignment, run_config: RunConfig) -> Self {
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            shuffle_version: SHUFFLE_VERSION,
            tool_version: TOOL_VERSION.into(),
            seed: split.seed,
            ratios: split.ratios,
            train: split.train,
            val: split.val,
            test: split.test,
            run_config,
        }
    }

    pub fn assignment(&self) -> SplitAssignment {
        SplitAssignment {
            seed: self.seed,
            ratios: self.ratios,
            train: self.train.clone(),
            val: self.val.clone(),
            test: self.test.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn write_manifest(path: &Path, manifest: &SplitManifest) -> Result<(), DatasetError> {
    std::fs::write(path, manifest.to_json()).map_err(|e| io_err(path, 0, e))
}

pub fn read_manifest(path: &Path) -> Result<SplitManifest, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, 0, e))?;
    let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| io_err(path, e.line(), e))?;
    let found = raw.get("schema_version").and_then(|v| v.as_u64());
    if found != Some(MANIFEST_SCHEMA_VERSION as u64) {
        return Err(DatasetError::SchemaMismatch {
            expected: MANIFEST_SCHEMA_VERSION,
            found: found.map(|v| v.to_string()).unwrap_or_else(|| "missing".into()),
        });
    }
    serde_json::from_value(raw).map_err(|e| io_err(path, 0, e))
}
