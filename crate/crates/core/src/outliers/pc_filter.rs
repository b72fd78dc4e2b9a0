//! Principal-component score thresholds on the raw (un-normalized) matrix.

use crate::error::{Error, Result};
use crate::linalg::{covariance, symmetric_eigen, Matrix};

pub const DEFAULT_PC1_MAX: f64 = 25.0;
pub const DEFAULT_PC2_MIN: f64 = 7.5;

/// Scores of every row on the first two principal axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PcProjection {
    pub pc1: Vec<f64>,
    pub pc2: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    pub means: Vec<f64>,
    /// All rows equal: projections are zero and nothing should be flagged.
    pub degenerate: bool,
}

/// Fits principal axes on `fit` (mean-centred covariance, n − 1) and
/// projects every row of `data` onto the first two.
pub fn pc_projection(fit: &Matrix, data: &Matrix) -> Result<PcProjection> {
    if fit.cols() < 2 || fit.rows() < 3 {
        return Err(Error::InvalidParameter(format!(
            "principal-component filter needs at least 3 rows and 2 columns, got {}x{}",
            fit.rows(),
            fit.cols()
        )));
    }
    if data.cols() != fit.cols() {
        return Err(Error::DimensionMismatch {
            expected: fit.cols(),
            actual: data.cols(),
        });
    }
    let means = fit.column_means();
    let cov = covariance(fit)?;
    let degenerate = cov.as_slice().iter().all(|v| *v == 0.0);
    let eig = symmetric_eigen(&cov)?;
    let axis1 = eig.vectors[0].clone();
    let axis2 = eig.vectors[1].clone();
    let project = |row: &[f64], axis: &[f64]| -> f64 {
        if degenerate {
            return 0.0;
        }
        row.iter()
            .zip(&means)
            .zip(axis)
            .map(|((x, m), a)| (x - m) * a)
            .sum()
    };
    Ok(PcProjection {
        pc1: data.iter_rows().map(|r| project(r, &axis1)).collect(),
        pc2: data.iter_rows().map(|r| project(r, &axis2)).collect(),
        eigenvalues: eig.values,
        axis1,
        axis2,
        means,
        degenerate,
    })
}

/// Flags rows with `pc1 < pc1_max` and `pc2 ≥ pc2_min`.
pub fn threshold_flags(pc1: &[f64], pc2: &[f64], pc1_max: f64, pc2_min: f64) -> Vec<bool> {
    pc1.iter()
        .zip(pc2)
        .map(|(a, b)| *a < pc1_max && *b >= pc2_min)
        .collect()
}

/// Projection plus flags; a degenerate (rank-0) matrix flags nothing.
pub fn pc_score_filter(
    data: &Matrix,
    pc1_max: f64,
    pc2_min: f64,
) -> Result<(PcProjection, Vec<bool>)> {
    let proj = pc_projection(data, data)?;
    let flags = if proj.degenerate {
        vec![false; data.rows()]
    } else {
        threshold_flags(&proj.pc1, &proj.pc2, pc1_max, pc2_min)
    };
    Ok((proj, flags))
}
