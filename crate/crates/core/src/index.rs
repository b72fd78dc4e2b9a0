//! Min-max normalization, PC1-derived weights and the weighted index.

use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::aggregate::{feature_index, FEATURE_NAMES, N_FEATURES};
use crate::error::{Error, Result};
use crate::linalg::{covariance, symmetric_eigen, Matrix};

/// Bundled reference weights for the 13 canonical features.
pub const REFERENCE_WEIGHTS_CSV: &str = include_str!("../data/reference_weights.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    /// Columns with `max == min`, mapped to 0.
    pub constant: Vec<bool>,
}

/// Rescales every column to [0, 1] via `(x − min) / (max − min)`.
/// Constant columns become all zeros and are flagged.
pub fn minmax_normalize(m: &Matrix) -> Result<(Matrix, NormalizationStats)> {
    if m.rows() == 0 {
        return Err(Error::Degenerate("cannot normalize an empty matrix".into()));
    }
    let p = m.cols();
    let mut min = vec![f64::INFINITY; p];
    let mut max = vec![f64::NEG_INFINITY; p];
    for row in m.iter_rows() {
        for j in 0..p {
            min[j] = min[j].min(row[j]);
            max[j] = max[j].max(row[j]);
        }
    }
    let constant: Vec<bool> = (0..p).map(|j| max[j] == min[j]).collect();
    let mut out = m.clone();
    for i in 0..m.rows() {
        let row = out.row_mut(i);
        for j in 0..p {
            row[j] = if constant[j] {
                0.0
            } else {
                (row[j] - min[j]) / (max[j] - min[j])
            };
        }
    }
    Ok((out, NormalizationStats { min, max, constant }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pc1 {
    pub loadings: Vec<f64>,
    pub eigenvalue: f64,
    pub explained_variance_ratio: f64,
}

/// Leading eigenvector of the column covariance, oriented so its
/// largest-magnitude component is positive.
pub fn pc1_loadings(normalized: &Matrix) -> Result<Pc1> {
    if normalized.rows() < 2 || normalized.cols() == 0 {
        return Err(Error::Degenerate(format!(
            "PCA needs at least 2 rows and 1 column, got {}x{}",
            normalized.rows(),
            normalized.cols()
        )));
    }
    let cov = covariance(normalized)?;
    if cov.as_slice().iter().all(|v| *v == 0.0) {
        return Err(Error::Degenerate(
            "covariance is identically zero; no direction of variation".into(),
        ));
    }
    let eig = symmetric_eigen(&cov)?;
    let total: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
    Ok(Pc1 {
        loadings: eig.vectors[0].clone(),
        eigenvalue: eig.values[0],
        explained_variance_ratio: if total > 0.0 {
            (eig.values[0] / total).clamp(0.0, 1.0)
        } else {
            0.0
        },
    })
}

/// Per-feature weights with the loadings they came from, when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub features: Vec<String>,
    pub weights: Vec<f64>,
    pub loadings: Vec<Option<f64>>,
    pub explained_variance_ratio: Option<f64>,
}

/// `w(i) = |l(i)| / Σ |l(j)|`; features are named by position.
pub fn weights_from_loadings(loadings: &[f64]) -> Result<WeightVector> {
    let total: f64 = loadings.iter().map(|l| l.abs()).sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::Degenerate(
            "loadings are all zero; weights undefined".into(),
        ));
    }
    let features = if loadings.len() == N_FEATURES {
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (0..loadings.len()).map(|i| format!("x{i}")).collect()
    };
    Ok(WeightVector {
        features,
        weights: loadings.iter().map(|l| l.abs() / total).collect(),
        loadings: loadings.iter().copied().map(Some).collect(),
        explained_variance_ratio: None,
    })
}

/// PCA on `normalized` followed by weight derivation.
pub fn derive_weights(normalized: &Matrix) -> Result<WeightVector> {
    let pc1 = pc1_loadings(normalized)?;
    let mut w = weights_from_loadings(&pc1.loadings)?;
    w.explained_variance_ratio = Some(pc1.explained_variance_ratio);
    Ok(w)
}

impl WeightVector {
    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn reference() -> Self {
        Self::read_csv(REFERENCE_WEIGHTS_CSV.as_bytes()).expect("bundled reference weights")
    }

    /// `feature,weight,loading` in canonical feature order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["feature", "weight", "loading"])?;
        for i in 0..self.weights.len() {
            w.write_record([
                self.features[i].clone(),
                self.weights[i].to_string(),
                self.loadings[i].map(|l| l.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    /// Reads a weight file that lists each canonical feature exactly once
    /// (any order, `#` comments allowed). Weights are kept verbatim.
    pub fn read_csv<R: Read>(source: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .flexible(true)
            .from_reader(source);
        let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let col = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Schema(format!("weight file: missing column {name:?}")))
        };
        let (fi, wi) = (col("feature")?, col("weight")?);
        let li = header.iter().position(|h| h == "loading");

        let mut weights = [None; N_FEATURES];
        let mut loadings = [None; N_FEATURES];
        for (n, rec) in r.records().enumerate() {
            let rec = rec?;
            let name = rec.get(fi).unwrap_or("").trim();
            let k = feature_index(name).ok_or_else(|| {
                Error::Schema(format!(
                    "weight file row {}: unknown feature {name:?}",
                    n + 1
                ))
            })?;
            if weights[k].is_some() {
                return Err(Error::Schema(format!(
                    "weight file: feature {name:?} listed twice"
                )));
            }
            let raw = rec.get(wi).unwrap_or("").trim();
            let w: f64 = raw.parse().map_err(|_| {
                Error::Schema(format!("weight file: bad weight {raw:?} for {name}"))
            })?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Schema(format!(
                    "weight file: weight for {name} must be finite and non-negative"
                )));
            }
            weights[k] = Some(w);
            loadings[k] = match li.and_then(|i| rec.get(i)).map(str::trim) {
                None | Some("") => None,
                Some(s) => Some(s.parse().map_err(|_| {
                    Error::Schema(format!("weight file: bad loading {s:?} for {name}"))
                })?),
            };
        }
        if let Some(k) = weights.iter().position(Option::is_none) {
            return Err(Error::Schema(format!(
                "weight file: feature {:?} missing",
                FEATURE_NAMES[k]
            )));
        }
        Ok(WeightVector {
            features: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            weights: weights.iter().map(|w| w.unwrap()).collect(),
            loadings: loadings.to_vec(),
            explained_variance_ratio: None,
        })
    }
}

/// Dated index values.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub dates: Vec<NaiveDate>,
    pub csei: Vec<f64>,
}

fn check_width(normalized: &Matrix, weights: &WeightVector) -> Result<()> {
    if weights.weights.len() != normalized.cols() {
        return Err(Error::DimensionMismatch {
            expected: normalized.cols(),
            actual: weights.weights.len(),
        });
    }
    Ok(())
}

/// `csei(t) = Σ w(i) · x_norm(i, t)`
pub fn compute_index(
    normalized: &Matrix,
    dates: &[NaiveDate],
    weights: &WeightVector,
) -> Result<IndexSeries> {
    check_width(normalized, weights)?;
    if dates.len() != normalized.rows() {
        return Err(Error::DimensionMismatch {
            expected: normalized.rows(),
            actual: dates.len(),
        });
    }
    let csei = normalized
        .iter_rows()
        .map(|row| row.iter().zip(&weights.weights).map(|(x, w)| w * x).sum())
        .collect();
    Ok(IndexSeries {
        dates: dates.to_vec(),
        csei,
    })
}

impl IndexSeries {
    pub fn len(&self) -> usize {
        self.csei.len()
    }

    pub fn is_empty(&self) -> bool {
        self.csei.is_empty()
    }

    /// `date,csei`
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", "csei"])?;
        for (d, v) in self.dates.iter().zip(&self.csei) {
            w.write_record([d.to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(source: R) -> Result<Self> {
        let (names, dates, values) = crate::aggregate::read_dated_matrix(source)?;
        if names != ["csei"] {
            return Err(Error::Schema(format!(
                "index file must have columns date,csei; found {names:?}"
            )));
        }
        Ok(IndexSeries {
            dates,
            csei: values.column(0),
        })
    }
}

/// Reporting groups over the canonical features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureGroup {
    Sentiment,
    Engagement,
    Quality,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 3] = [
        FeatureGroup::Sentiment,
        FeatureGroup::Engagement,
        FeatureGroup::Quality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::Sentiment => "sentiment",
            FeatureGroup::Engagement => "engagement",
            FeatureGroup::Quality => "quality",
        }
    }

    pub fn of(feature: &str) -> Option<FeatureGroup> {
        Some(match feature {
            "daily_post_count" | "domain_diversity" | "daily_total_score" => {
                FeatureGroup::Engagement
            }
            "readability" | "offensive" => FeatureGroup::Quality,
            "compound_sentiment" | "anger" | "disgust" | "fear" | "joy" | "neutral" | "sadness"
            | "surprise" => FeatureGroup::Sentiment,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contributions {
    /// `w(i) · x_norm(i, t)`, one row per date.
    pub per_feature: Matrix,
    /// Columns follow [`FeatureGroup::ALL`]; features outside every group
    /// are not counted.
    pub groups: Matrix,
}

pub fn contribution_decomposition(
    normalized: &Matrix,
    weights: &WeightVector,
) -> Result<Contributions> {
    check_width(normalized, weights)?;
    let mut per_feature = normalized.clone();
    let mut groups = Matrix::zeros(normalized.rows(), FeatureGroup::ALL.len());
    let group_of: Vec<Option<usize>> = weights
        .features
        .iter()
        .map(|f| FeatureGroup::of(f).map(|g| g as usize))
        .collect();
    for t in 0..normalized.rows() {
        let row = per_feature.row_mut(t);
        for (i, x) in row.iter_mut().enumerate() {
            *x *= weights.weights[i];
        }
        let row = per_feature.row(t).to_vec();
        for (i, c) in row.iter().enumerate() {
            if let Some(g) = group_of[i] {
                groups[(t, g)] += c;
            }
        }
    }
    Ok(Contributions {
        per_feature,
        groups,
    })
}
