use serde::{Deserialize, Serialize};

use super::DatasetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowPurpose {
    Training,
    Inference,
}

/// A run of `m` sentence slots over one document. Slot values are 1-based
/// sentence indices; 0 marks a padding slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub doc_id: String,
    /// Position of the first slot. Inference windows near the start of a
    /// document begin at or below zero.
    pub start: i64,
    pub indices: Vec<usize>,
    pub m: usize,
    pub purpose: WindowPurpose,
    pub center: Option<usize>,
}

impl Window {
    pub fn padding_count(&self) -> usize {
        self.indices.iter().filter(|&&i| i == 0).count()
    }

    pub fn mask(&self) -> Vec<bool> {
        self.indices.iter().map(|&i| i != 0).collect()
    }

    /// Slot holding the center sentence of an inference window.
    pub fn center_slot(&self) -> Option<usize> {
        self.center.and_then(|c| self.indices.iter().position(|&i| i == c))
    }
}

pub fn check_window_length(m: usize) -> Result<(), DatasetError> {
    if m < 2 || m % 2 != 0 {
        return Err(DatasetError::BadWindowLength { m });
    }
    Ok(())
}

/// Overlapping training windows over a document of `n` sentences.
///
/// Windows start at 1, 1+m/2, 1+m, ... while they fit. If the last one does
/// not reach sentence `n`, a final window starting at `n-m+1` is added.
/// Documents shorter than `m` get one window padded at the end.
pub fn make_training_windows(doc_id: &str, n: usize, m: usize) -> Result<Vec<Window>, DatasetError> {
    check_window_length(m)?;
    let window = |start: usize| {
        let indices = (start..start + m).map(|i| if i <= n { i } else { 0 }).collect();
        Window {
            doc_id: doc_id.to_string(),
            start: start as i64,
            indices,
            m,
            purpose: WindowPurpose::Training,
            center: None,
        }
    };
    if n == 0 {
        return Ok(Vec::new());
    }
    if n <= m {
        return Ok(vec![window(1)]);
    }
    let step = m / 2;
    let mut out = Vec::new();
    let mut start = 1;
    while start + m - 1 <= n {
        out.push(window(start));
        start += step;
    }
    let last_end = out.last().map(|w| w.start as usize + m - 1).unwrap_or(0);
    if last_end < n {
        out.push(window(n - m + 1));
    }
    Ok(out)
}

/// Window centered on sentence `i`: `m/2` slots before it and `m/2 - 1`
/// after, with out-of-document slots padded.
pub fn make_inference_window(doc_id: &str, n: usize, i: usize, m: usize) -> Result<Window, DatasetError> {
    check_window_length(m)?;
    if i == 0 || i > n {
        return Err(DatasetError::IndexOutOfRange { index: i, len: n });
    }
    let start = i as i64 - (m / 2) as i64;
    let indices = (start..start + m as i64)
        .map(|j| if j >= 1 && j <= n as i64 { j as usize } else { 0 })
        .collect();
    Ok(Window {
        doc_id: doc_id.to_string(),
        start,
        indices,
        m,
        purpose: WindowPurpose::Inference,
        center: Some(i),
    })
}
