//! Precomputed per-sentence vectors keyed by `(doc_id, sentence index)`.
//!
//! Binary layout, little endian: the 8-byte magic `CWVECTRS`, `u32` format
//! version, `u32` dimension, `u64` record count, then per record a `u64`
//! document hash (first 8 bytes of SHA-256 of the doc id), a `u32` 1-based
//! sentence index and `dimension` `f32` values.
//!
//! The JSON-lines form has one `{"doc_id", "index", "vector"}` object per
//! line.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ModelError;

pub const VECTORS_MAGIC: &[u8; 8] = b"CWVECTRS";
pub const VECTORS_FORMAT_VERSION: u32 = 1;

pub fn doc_hash(doc_id: &str) -> u64 {
    let digest = Sha256::digest(doc_id.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorRecord {
    pub doc_id: String,
    pub index: u32,
    pub vector: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalVectors {
    dim: usize,
    map: HashMap<(u64, u32), Vec<f32>>,
}

fn bad(message: impl Into<String>) -> ModelError {
    ModelError::VectorFile(message.into())
}

impl ExternalVectors {
    pub fn from_records(records: impl IntoIterator<Item = VectorRecord>) -> Result<Self, ModelError> {
        let mut dim = None;
        let mut map = HashMap::new();
        for r in records {
            let d = *dim.get_or_insert(r.vector.len());
            if r.vector.len() != d {
                return Err(bad(format!(
                    "vector for {}#{} has dimension {}, expected {d}",
                    r.doc_id,
                    r.index,
                    r.vector.len()
                )));
            }
            if map.insert((doc_hash(&r.doc_id), r.index), r.vector).is_some() {
                return Err(bad(format!("duplicate vector for {}#{}", r.doc_id, r.index)));
            }
        }
        let dim = dim.ok_or_else(|| bad("vector file has no records"))?;
        if dim == 0 {
            return Err(bad("vectors have dimension 0"));
        }
        Ok(Self { dim, map })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, doc_id: &str, index: usize) -> Option<&[f32]> {
        let index = u32::try_from(index).ok()?;
        self.map.get(&(doc_hash(doc_id), index)).map(Vec::as_slice)
    }

    /// Read either layout; the binary one is recognized by its magic.
    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let bytes = fs::read(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        if bytes.starts_with(VECTORS_MAGIC) {
            Self::from_binary(&bytes)
        } else {
            Self::from_jsonl(BufReader::new(bytes.as_slice()))
        }
    }

    fn from_jsonl(reader: impl BufRead) -> Result<Self, ModelError> {
        let mut records = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| bad(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let r: VectorRecord = serde_json::from_str(&line).map_err(|e| bad(format!("line {}: {e}", n + 1)))?;
            records.push(r);
        }
        Self::from_records(records)
    }

    fn from_binary(bytes: &[u8]) -> Result<Self, ModelError> {
        let mut cur = Cursor { bytes, pos: VECTORS_MAGIC.len() };
        let version = cur.u32()?;
        if version != VECTORS_FORMAT_VERSION {
            return Err(bad(format!("unsupported vector format version {version}")));
        }
        let dim = cur.u32()? as usize;
        let count = cur.u64()?;
        if dim == 0 {
            return Err(bad("vectors have dimension 0"));
        }
        let mut map = HashMap::new();
        for _ in 0..count {
            let hash = cur.u64()?;
            let index = cur.u32()?;
            let vector = (0..dim).map(|_| cur.f32()).collect::<Result<Vec<_>, _>>()?;
            if map.insert((hash, index), vector).is_some() {
                return Err(bad(format!("duplicate vector record for sentence {index}")));
            }
        }
        if cur.pos != bytes.len() {
            return Err(bad("trailing bytes after last vector record"));
        }
        Ok(Self { dim, map })
    }
}

/// Write records in the binary layout.
pub fn write_binary_vectors(path: &Path, records: &[VectorRecord]) -> Result<(), ModelError> {
    let dim = records.first().map(|r| r.vector.len()).ok_or_else(|| bad("no records to write"))?;
    let mut out = Vec::with_capacity(24 + records.len() * (12 + 4 * dim));
    out.extend_from_slice(VECTORS_MAGIC);
    out.extend_from_slice(&VECTORS_FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    out.extend_from_slice(&(records.len() as u64).to_le_bytes());
    for r in records {
        if r.vector.len() != dim {
            return Err(bad(format!("vector for {}#{} has dimension {}, expected {dim}", r.doc_id, r.index, r.vector.len())));
        }
        out.extend_from_slice(&doc_hash(&r.doc_id).to_le_bytes());
        out.extend_from_slice(&r.index.to_le_bytes());
        for v in &r.vector {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, out).map_err(|e| bad(format!("{}: {e}", path.display())))
}

/// Write records as JSON lines.
pub fn write_jsonl_vectors(path: &Path, records: &[VectorRecord]) -> Result<(), ModelError> {
    let mut f = fs::File::create(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    for r in records {
        let line = serde_json::to_string(r).expect("record serializes");
        writeln!(f, "{line}").map_err(|e| bad(e.to_string()))?;
    }
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], ModelError> {
        let end = self.pos + N;
        let slice = self.bytes.get(self.pos..end).ok_or_else(|| bad("vector file truncated"))?;
        self.pos = end;
        Ok(slice.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32, ModelError> {
        self.take().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64, ModelError> {
        self.take().map(u64::from_le_bytes)
    }

    fn f32(&mut self) -> Result<f32, ModelError> {
        self.take().map(f32::from_le_bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records() -> Vec<VectorRecord> {
        vec![
            VectorRecord { doc_id: "a".into(), index: 1, vector: vec![0.5, -1.0, 2.0] },
            VectorRecord { doc_id: "a".into(), index: 2, vector: vec![0.0, 1.0, 0.25] },
            VectorRecord { doc_id: "b".into(), index: 1, vector: vec![3.0, 3.0, 3.0] },
        ]
    }

    #[test]
    fn binary_and_jsonl_agree() {
        let dir = tempfile::tempdir().unwrap();
        let bin = dir.path().join("v.bin");
        let jsonl = dir.path().join("v.jsonl");
        write_binary_vectors(&bin, &records()).unwrap();
        write_jsonl_vectors(&jsonl, &records()).unwrap();
        let a = ExternalVectors::load(&bin).unwrap();
        let b = ExternalVectors::load(&jsonl).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 3);
        assert_eq!(a.get("a", 2), Some(&[0.0, 1.0, 0.25][..]));
        assert_eq!(a.get("c", 1), None);
    }

    #[test]
    fn malformed_inputs() {
        let mut rs = records();
        rs[1].vector.pop();
        assert!(ExternalVectors::from_records(rs).is_err());
        let mut rs = records();
        rs[1].index = 1;
        assert!(ExternalVectors::from_records(rs).is_err());
        assert!(ExternalVectors::from_records(Vec::new()).is_err());

        let dir = tempfile::tempdir().unwrap();
        let bin = dir.path().join("v.bin");
        write_binary_vectors(&bin, &records()).unwrap();
        let bytes = fs::read(&bin).unwrap();
        fs::write(&bin, &bytes[..bytes.len() - 2]).unwrap();
        assert!(matches!(ExternalVectors::load(&bin), Err(ModelError::VectorFile(_))));
    }
}
