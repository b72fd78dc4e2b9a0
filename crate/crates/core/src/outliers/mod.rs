//! Two-step outlier removal: Isolation Forest at a fixed contamination
//! rate, then principal-component score thresholds on the remaining rows.

pub mod iforest;
pub mod pc_filter;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::Matrix;

pub use iforest::{anomaly_scores, contamination_filter, fit_isolation_forest, IsolationForest};
pub use pc_filter::{pc_projection, pc_score_filter, PcProjection};

pub const DEFAULT_CONTAMINATION: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierConfig {
    pub n_trees: usize,
    /// `None` means `min(256, rows)`.
    pub subsample_size: Option<usize>,
    pub seed: u64,
    pub contamination: f64,
    pub pc1_max: f64,
    pub pc2_min: f64,
}

impl Default for OutlierConfig {
    fn default() -> Self {
        OutlierConfig {
            n_trees: iforest::DEFAULT_TREES,
            subsample_size: None,
            seed: 0,
            contamination: DEFAULT_CONTAMINATION,
            pc1_max: pc_filter::DEFAULT_PC1_MAX,
            pc2_min: pc_filter::DEFAULT_PC2_MIN,
        }
    }
}

/// Whether outlier removal runs on daily feature rows or on individual posts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierGranularity {
    #[default]
    Daily,
    Post,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReport {
    /// Row labels (dates for daily rows).
    pub labels: Vec<String>,
    pub anomaly_scores: Vec<f64>,
    pub forest_flags: Vec<bool>,
    pub pc1: Vec<f64>,
    pub pc2: Vec<f64>,
    pub pc_flags: Vec<bool>,
    pub removed_indices: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Runs both detectors over `data`. The principal axes are fitted on the
/// rows the forest kept; every row is projected and thresholded.
pub fn detect_outliers(
    data: &Matrix,
    labels: Vec<String>,
    config: &OutlierConfig,
) -> Result<OutlierReport> {
    if !(0.0..1.0).contains(&config.contamination) {
        return Err(crate::Error::InvalidParameter(format!(
            "contamination {} outside [0, 1)",
            config.contamination
        )));
    }
    let psi = config
        .subsample_size
        .unwrap_or(iforest::DEFAULT_SUBSAMPLE)
        .min(data.rows());
    let forest = fit_isolation_forest(data, config.n_trees, psi, config.seed)?;
    let scores = anomaly_scores(&forest, data)?;
    let forest_flags = contamination_filter(&scores, config.contamination);

    let dropped: Vec<usize> = (0..data.rows()).filter(|&i| forest_flags[i]).collect();
    let kept = data.without_rows(&dropped);
    let proj = pc_projection(&kept, data)?;
    let mut warnings = Vec::new();
    let pc_flags = if proj.degenerate {
        warnings.push("principal-component filter skipped: all rows are identical".into());
        vec![false; data.rows()]
    } else {
        pc_filter::threshold_flags(&proj.pc1, &proj.pc2, config.pc1_max, config.pc2_min)
    };
    let removed_indices = (0..data.rows())
        .filter(|&i| forest_flags[i] || pc_flags[i])
        .collect();
    Ok(OutlierReport {
        labels,
        anomaly_scores: scores,
        forest_flags,
        pc1: proj.pc1,
        pc2: proj.pc2,
        pc_flags,
        removed_indices,
        eigenvalues: proj.eigenvalues,
        warnings,
    })
}

impl OutlierReport {
    pub fn forest_removed(&self) -> usize {
        self.forest_flags.iter().filter(|f| **f).count()
    }

    /// Rows removed only by the principal-component thresholds.
    pub fn pc_only_removed(&self) -> usize {
        self.forest_flags
            .iter()
            .zip(&self.pc_flags)
            .filter(|(f, p)| !**f && **p)
            .count()
    }

    /// `date,anomaly_score,forest_flag,pc1,pc2,pc_flag,removed`
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "date",
            "anomaly_score",
            "forest_flag",
            "pc1",
            "pc2",
            "pc_flag",
            "removed",
        ])?;
        for i in 0..self.labels.len() {
            let removed = self.forest_flags[i] || self.pc_flags[i];
            w.write_record([
                self.labels[i].clone(),
                self.anomaly_scores[i].to_string(),
                u8::from(self.forest_flags[i]).to_string(),
                self.pc1[i].to_string(),
                self.pc2[i].to_string(),
                u8::from(self.pc_flags[i]).to_string(),
                u8::from(removed).to_string(),
            ])?;
        }
        w.flush().map_err(|e| crate::Error::Csv(e.into()))?;
        Ok(())
    }
}
