use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::rng;

pub const DEFAULT_RATIOS: SplitRatios = SplitRatios { train: 0.6, val: 0.2, test: 0.2 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self, DatasetError> {
        let r = Self { train, val, test };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let parts = [self.train, self.val, self.test];
        let sum: f64 = parts.iter().sum();
        if parts.iter().any(|r| !r.is_finite() || *r <= 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(DatasetError::BadRatios { ratios: parts });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitPart {
    Train,
    Val,
    Test,
}

impl std::str::FromStr for SplitPart {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(SplitPart::Train),
            "val" | "validation" | "dev" => Ok(SplitPart::Val),
            "test" => Ok(SplitPart::Test),
            other => Err(format!("unknown split part {other:?}")),
        }
    }
}

/// Document-level train/val/test assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub seed: u64,
    pub ratios: SplitRatios,
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

impl SplitAssignment {
    pub fn part(&self, part: SplitPart) -> &[String] {
        match part {
            SplitPart::Train => &self.train,
            SplitPart::Val => &self.val,
            SplitPart::Test => &self.test,
        }
    }

    pub fn part_of(&self, doc_id: &str) -> Option<SplitPart> {
        [SplitPart::Train, SplitPart::Val, SplitPart::Test]
            .into_iter()
            .find(|p| self.part(*p).iter().any(|d| d == doc_id))
    }
}

/// Shuffle the (sorted) document ids with the seeded Fisher–Yates shuffle and
/// cut `floor(r·N)` ids for validation and test; train takes the rest.
pub fn split_documents<I, S>(doc_ids: I, ratios: SplitRatios, seed: u64) -> Result<SplitAssignment, DatasetError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    ratios.validate()?;
    let ids: BTreeSet<String> = doc_ids.into_iter().map(Into::into).collect();
    if ids.len() < 3 {
        return Err(DatasetError::InsufficientDocuments { found: ids.len() });
    }
    let mut ids: Vec<String> = ids.into_iter().collect();
    let mut rng = rng::seeded(seed);
    rng::shuffle(&mut rng, &mut ids);

    let n = ids.len();
    // Guard against 0.2 * 100 landing a hair under 20.
    let take = |r: f64| ((r * n as f64) + 1e-9).floor() as usize;
    let n_val = take(ratios.val);
    let n_test = take(ratios.test);
    let test = ids.split_off(n - n_test);
    let val = ids.split_off(n - n_test - n_val);
    Ok(SplitAssignment { seed, ratios, train: ids, val, test })
}
