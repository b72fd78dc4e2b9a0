//! Stage orchestration: ingest → build (score, aggregate, outliers, weights,
//! index) → analyze. Errors carry the stage they came from.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::aggregate::{
    build_daily_features, write_dated_matrix, AggregateOptions, FeatureMatrix, FEATURE_NAMES,
};
use crate::error::{Error, Result};
use crate::index::{
    compute_index, contribution_decomposition, derive_weights, minmax_normalize, Contributions,
    FeatureGroup, IndexSeries, NormalizationStats, WeightVector,
};
use crate::ingest::{
    filter_posts, parse_posts, CleanPost, FilterConfig, InputFormat, MalformedRecord, RawPost,
    RemovalLedger,
};
use crate::linalg::Matrix;
use crate::outliers::{detect_outliers, OutlierConfig, OutlierGranularity, OutlierReport};
use crate::scoring::{attach_external_scores, ExternalScores, Lexicon, ScoredPost, EMOTION_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Ingest,
    Scoring,
    Aggregate,
    Outliers,
    Index,
    Analysis,
    Output,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Scoring => "scoring",
            Stage::Aggregate => "aggregate",
            Stage::Outliers => "outliers",
            Stage::Index => "index",
            Stage::Analysis => "analysis",
            Stage::Output => "output",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

pub trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

pub struct IngestOutput {
    pub survivors: Vec<CleanPost>,
    pub ledger: RemovalLedger,
    pub malformed: Vec<MalformedRecord>,
}

pub fn run_ingest<R: Read>(
    source: R,
    format: InputFormat,
    filter: &FilterConfig,
) -> std::result::Result<IngestOutput, StageError> {
    let parsed = parse_posts(source, format).at(Stage::Ingest)?;
    let mut out = filter_posts(parsed.posts, filter).at(Stage::Ingest)?;
    out.ledger.malformed = parsed.malformed.len();
    Ok(IngestOutput {
        survivors: out.survivors,
        ledger: out.ledger,
        malformed: parsed.malformed,
    })
}

const CLEAN_HEADER: [&str; 12] = [
    "id",
    "subreddit.name",
    "subreddit.nsfw",
    "created_utc",
    "domain",
    "url",
    "selftext",
    "title",
    "score",
    "type",
    "clean_text",
    "post_date",
];

pub fn write_clean_posts<W: Write>(out: W, posts: &[CleanPost]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CLEAN_HEADER)?;
    for p in posts {
        let r = &p.raw;
        w.write_record([
            r.id.as_str(),
            &r.subreddit_name,
            if r.nsfw { "true" } else { "false" },
            &r.created_utc.to_string(),
            &r.domain,
            &r.url,
            &r.selftext,
            &r.title,
            &r.score.to_string(),
            &r.kind,
            &p.clean_text,
            &p.post_date.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn read_clean_posts<R: Read>(source: R) -> Result<Vec<CleanPost>> {
    let mut r = csv::Reader::from_reader(source);
    let header = r.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("clean posts file: missing column {name:?}")))
    };
    let idx: Vec<usize> = CLEAN_HEADER.iter().map(|n| col(n)).collect::<Result<_>>()?;
    let mut posts = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        let f = |k: usize| rec.get(idx[k]).unwrap_or("");
        let bad = |what: &str| Error::Schema(format!("clean posts row {}: bad {what}", n + 1));
        let raw = RawPost {
            id: f(0).to_string(),
            subreddit_name: f(1).to_string(),
            nsfw: f(2).parse().map_err(|_| bad("subreddit.nsfw"))?,
            created_utc: f(3).parse().map_err(|_| bad("created_utc"))?,
            domain: f(4).to_string(),
            url: f(5).to_string(),
            selftext: f(6).to_string(),
            title: f(7).to_string(),
            score: f(8).parse().map_err(|_| bad("score"))?,
            kind: f(9).to_string(),
        };
        posts.push(CleanPost {
            raw,
            clean_text: f(10).to_string(),
            post_date: f(11).parse().map_err(|_| bad("post_date"))?,
        });
    }
    Ok(posts)
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSource {
    Derive,
    Load(WeightVector),
}

#[derive(Debug, Clone)]
pub struct BuildParams {
    pub scores: BTreeMap<String, ExternalScores>,
    pub lexicon: Lexicon,
    pub alpha: f64,
    pub aggregate: AggregateOptions,
    pub outliers: OutlierConfig,
    pub granularity: OutlierGranularity,
    pub weights: WeightSource,
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    /// Daily features before outlier removal (after it, for post granularity).
    pub features: FeatureMatrix,
    pub outliers: OutlierReport,
    /// Daily rows that enter the index.
    pub retained: FeatureMatrix,
    pub normalized: Matrix,
    pub normalization: NormalizationStats,
    pub weights: WeightVector,
    pub index: IndexSeries,
    pub contributions: Contributions,
    pub scored_posts: usize,
    pub defaulted: usize,
    pub renormalized: usize,
    pub warnings: Vec<String>,
}

/// Post-level columns used when outliers are detected per post.
pub const POST_OUTLIER_COLUMNS: [&str; 11] = [
    "compound",
    "score",
    "readability",
    "offensive",
    "fear",
    "surprise",
    "joy",
    "sadness",
    "anger",
    "disgust",
    "neutral",
];

fn post_matrix(posts: &[ScoredPost]) -> Result<Matrix> {
    let mut data = Vec::with_capacity(posts.len() * POST_OUTLIER_COLUMNS.len());
    for p in posts {
        data.extend([
            p.compound,
            p.post.raw.score as f64,
            p.readability,
            p.offensive,
        ]);
        data.extend(p.emotions.to_array());
    }
    debug_assert_eq!(EMOTION_NAMES.len() + 4, POST_OUTLIER_COLUMNS.len());
    Matrix::from_row_major(posts.len(), POST_OUTLIER_COLUMNS.len(), data)
}

pub fn run_build(
    posts: Vec<CleanPost>,
    params: &BuildParams,
) -> std::result::Result<BuildOutput, StageError> {
    let scored = attach_external_scores(posts, &params.scores, &params.lexicon, params.alpha)
        .at(Stage::Scoring)?;
    let mut warnings = scored.warnings.clone();
    let (defaulted, renormalized) = (scored.defaulted(), scored.renormalized());
    if defaulted > 0 {
        warnings.push(format!(
            "{defaulted} post(s) had no external scores; neutral defaults used"
        ));
    }
    let scored_posts = scored.posts.len();

    let (features, outliers, retained) = match params.granularity {
        OutlierGranularity::Daily => {
            let features = build_daily_features(&scored.posts, params.aggregate);
            if features.is_empty() {
                return Err(StageError {
                    stage: Stage::Aggregate,
                    source: Error::Degenerate("no posts survived preprocessing".into()),
                });
            }
            let labels = features.dates.iter().map(|d| d.to_string()).collect();
            let report =
                detect_outliers(&features.values, labels, &params.outliers).at(Stage::Outliers)?;
            let retained = features.without_rows(&report.removed_indices);
            (features, report, retained)
        }
        OutlierGranularity::Post => {
            let m = post_matrix(&scored.posts).at(Stage::Outliers)?;
            let labels = scored.posts.iter().map(|p| p.post.raw.id.clone()).collect();
            let report = detect_outliers(&m, labels, &params.outliers).at(Stage::Outliers)?;
            let kept: Vec<ScoredPost> = scored
                .posts
                .into_iter()
                .enumerate()
                .filter(|(i, _)| report.removed_indices.binary_search(i).is_err())
                .map(|(_, p)| p)
                .collect();
            let features = build_daily_features(&kept, params.aggregate);
            (features.clone(), report, features)
        }
    };
    warnings.extend(outliers.warnings.iter().cloned());
    if retained.is_empty() {
        return Err(StageError {
            stage: Stage::Outliers,
            source: Error::Degenerate("outlier removal left no daily rows".into()),
        });
    }

    let (normalized, normalization) = minmax_normalize(&retained.values).at(Stage::Index)?;
    for (name, c) in FEATURE_NAMES.iter().zip(&normalization.constant) {
        if *c {
            warnings.push(format!("feature {name} is constant; normalized to 0"));
        }
    }
    let weights = match &params.weights {
        WeightSource::Derive => derive_weights(&normalized).at(Stage::Index)?,
        WeightSource::Load(w) => w.clone(),
    };
    let index = compute_index(&normalized, &retained.dates, &weights).at(Stage::Index)?;
    let contributions = contribution_decomposition(&normalized, &weights).at(Stage::Index)?;
    Ok(BuildOutput {
        features,
        outliers,
        retained,
        normalized,
        normalization,
        weights,
        index,
        contributions,
        scored_posts,
        defaulted,
        renormalized,
        warnings,
    })
}

impl BuildOutput {
    pub fn write_normalized<W: Write>(&self, out: W) -> Result<()> {
        write_dated_matrix(out, &FEATURE_NAMES, &self.retained.dates, &self.normalized)
    }

    /// Per-feature contributions, the three group sums and the index value.
    pub fn write_contributions<W: Write>(&self, out: W) -> Result<()> {
        let mut names: Vec<String> = self.weights.features.clone();
        names.extend(
            FeatureGroup::ALL
                .iter()
                .map(|g| format!("group_{}", g.name())),
        );
        names.push("csei".into());
        let c = &self.contributions;
        let mut data = Vec::with_capacity(self.index.len() * names.len());
        for t in 0..self.index.len() {
            data.extend_from_slice(c.per_feature.row(t));
            data.extend_from_slice(c.groups.row(t));
            data.push(self.index.csei[t]);
        }
        let m = Matrix::from_row_major(self.index.len(), names.len(), data)?;
        write_dated_matrix(out, &names, &self.index.dates, &m)
    }
}

/// Reads a `date,<13 features>` normalized matrix written by
/// [`BuildOutput::write_normalized`].
pub fn read_normalized<R: Read>(source: R) -> Result<(Vec<String>, Vec<NaiveDate>, Matrix)> {
    crate::aggregate::read_dated_matrix(source)
}
