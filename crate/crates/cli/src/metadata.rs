use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use csei_core::ingest::RemovalLedger;

pub const FILE_NAME: &str = "metadata.json";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestCounts {
    pub ledger: RemovalLedger,
    pub first_post_date: Option<NaiveDate>,
    pub last_post_date: Option<NaiveDate>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildCounts {
    pub scored_posts: usize,
    pub defaulted_scores: usize,
    pub renormalized_scores: usize,
    pub outlier_rows: usize,
    pub forest_removed: usize,
    pub pc_only_removed: usize,
    pub index_rows: usize,
    pub weight_sum: f64,
    pub explained_variance_ratio: Option<f64>,
    pub constant_features: Vec<String>,
    pub first_date: Option<NaiveDate>,
    pub last_date: Option<NaiveDate>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeCounts {
    pub index_rows: usize,
    pub deltas: usize,
    pub smoothed: usize,
    pub peaks: usize,
    pub valleys: usize,
    pub prominence: f64,
    pub event_days: usize,
    pub uncovered_events: usize,
    pub r: Option<f64>,
    pub p_value: Option<f64>,
    pub date_gaps: usize,
    pub warnings: Vec<String>,
}

/// Data time span rather than wall-clock time, so reruns are byte-identical.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub data_start: Option<NaiveDate>,
    pub data_end: Option<NaiveDate>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool: String,
    pub version: String,
    pub config: serde_json::Value,
    pub assumptions: BTreeMap<String, String>,
    pub timestamps: Timestamps,
    pub ingest: Option<IngestCounts>,
    pub build: Option<BuildCounts>,
    pub analyze: Option<AnalyzeCounts>,
}

impl RunMetadata {
    /// Existing metadata in `dir`, or a fresh record if there is none or it
    /// does not parse.
    pub fn load_or_new(dir: &Path) -> Self {
        std::fs::read(dir.join(FILE_NAME))
            .ok()
            .and_then(|b| serde_json::from_slice(&b).ok())
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metadata serializes");
        s.push('\n');
        s
    }
}
