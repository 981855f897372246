//! Versioned JSON documents.

use edgebasis_core::{CorruptionSpec, MatchResult, Transform};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub version: u32,
    #[serde(flatten)]
    pub result: MatchResult,
}

impl MatchReport {
    pub fn new(result: MatchResult) -> Self {
        Self { version: SCHEMA_VERSION, result }
    }
}

/// Ground truth written next to a synthetic pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub version: u32,
    pub seed: u64,
    pub edges: usize,
    pub transform: Transform,
    pub corruption: CorruptionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedMatch {
    pub id: String,
    pub result: MatchResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub version: u32,
    pub results: Vec<RankedMatch>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use edgebasis_core::{match_edge_sets, random_edge_set, HypothesisConfig, VerifyConfig};

    #[test]
    fn match_report_shape() {
        let a = random_edge_set(60, 64, 64, 1);
        let r = match_edge_sets(&a, &a, &HypothesisConfig::default(), &VerifyConfig::default()).unwrap();
        let json = to_json(&MatchReport::new(r.clone()));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["decided"], true);
        assert_eq!(v["transform"]["s"], 1.0);
        assert!(v["transform"]["tx"].is_number() && v["transform"]["ty"].is_number());
        assert_eq!(v["matched_pairs"].as_array().unwrap().len(), 60);
        let back: MatchReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.result, r);
    }
}
