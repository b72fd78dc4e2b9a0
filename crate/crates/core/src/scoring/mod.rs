//! Per-post scores: compound sentiment and readability from the built-in
//! scorers, emotions and offensiveness from an externally computed table.

pub mod lexicon;
pub mod readability;
pub mod sentiment;

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::CleanPost;

pub use lexicon::Lexicon;
pub use readability::{count_syllables, flesch_reading_ease, Readability};
pub use sentiment::{compound_sentiment, DEFAULT_ALPHA};

pub const EMOTION_NAMES: [&str; 7] = [
    "fear", "surprise", "joy", "sadness", "anger", "disgust", "neutral",
];
const EMOTION_SUM_TOLERANCE: f64 = 1e-6;

/// Seven emotion probabilities, in [`EMOTION_NAMES`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Emotions {
    pub fear: f64,
    pub surprise: f64,
    pub joy: f64,
    pub sadness: f64,
    pub anger: f64,
    pub disgust: f64,
    pub neutral: f64,
}

impl Emotions {
    pub const NEUTRAL: Emotions = Emotions {
        fear: 0.0,
        surprise: 0.0,
        joy: 0.0,
        sadness: 0.0,
        anger: 0.0,
        disgust: 0.0,
        neutral: 1.0,
    };

    pub fn from_array(a: [f64; 7]) -> Self {
        Emotions {
            fear: a[0],
            surprise: a[1],
            joy: a[2],
            sadness: a[3],
            anger: a[4],
            disgust: a[5],
            neutral: a[6],
        }
    }

    pub fn to_array(self) -> [f64; 7] {
        [
            self.fear,
            self.surprise,
            self.joy,
            self.sadness,
            self.anger,
            self.disgust,
            self.neutral,
        ]
    }

    pub fn sum(self) -> f64 {
        self.to_array().iter().sum()
    }

    /// Index (in [`EMOTION_NAMES`] order) of the most probable emotion,
    /// lowest index on ties.
    pub fn dominant(self) -> usize {
        let a = self.to_array();
        let mut best = 0;
        for i in 1..a.len() {
            if a[i] > a[best] {
                best = i;
            }
        }
        best
    }
}

/// One row of the external score table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExternalScores {
    pub emotions: Emotions,
    pub offensive: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreFlags {
    /// No external row; neutral defaults used.
    pub defaulted: bool,
    /// Emotion vector did not sum to 1 and was rescaled.
    pub renormalized: bool,
    /// Text has no words; readability is the degenerate value.
    pub readability_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPost {
    pub post: CleanPost,
    pub compound: f64,
    pub emotions: Emotions,
    pub offensive: f64,
    pub readability: f64,
    pub flags: ScoreFlags,
}

/// Reads `id,fear,surprise,joy,sadness,anger,disgust,neutral,offensive`.
pub fn read_score_table<R: Read>(source: R) -> Result<BTreeMap<String, ExternalScores>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(source);
    let headers = reader.headers()?.clone();
    let mut idx = Vec::new();
    for name in std::iter::once("id")
        .chain(EMOTION_NAMES)
        .chain(std::iter::once("offensive"))
    {
        let i = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Schema(format!("score table: missing column {name:?}")))?;
        idx.push(i);
    }
    let mut out = BTreeMap::new();
    for (n, rec) in reader.records().enumerate() {
        let rec = rec?;
        let id = rec.get(idx[0]).unwrap_or("").trim().to_string();
        let mut vals = [0.0; 8];
        for (k, v) in vals.iter_mut().enumerate() {
            let raw = rec.get(idx[k + 1]).unwrap_or("").trim();
            *v = raw.parse().map_err(|_| Error::Data {
                id: id.clone(),
                message: format!("score table row {}: bad number {raw:?}", n + 1),
            })?;
        }
        let mut emotions = [0.0; 7];
        emotions.copy_from_slice(&vals[..7]);
        let scores = ExternalScores {
            emotions: Emotions::from_array(emotions),
            offensive: vals[7],
        };
        if out.insert(id.clone(), scores).is_some() {
            return Err(Error::Data {
                id,
                message: "duplicate id in score table".into(),
            });
        }
    }
    Ok(out)
}

/// Scores produced for one batch of posts.
#[derive(Debug, Clone)]
pub struct ScoringOutcome {
    pub posts: Vec<ScoredPost>,
    pub warnings: Vec<String>,
}

impl ScoringOutcome {
    pub fn defaulted(&self) -> usize {
        self.posts.iter().filter(|p| p.flags.defaulted).count()
    }

    pub fn renormalized(&self) -> usize {
        self.posts.iter().filter(|p| p.flags.renormalized).count()
    }
}

fn validate_external(id: &str, s: &ExternalScores) -> Result<(Emotions, bool)> {
    let data_err = |message: String| Error::Data {
        id: id.to_string(),
        message,
    };
    let values = s.emotions.to_array();
    for (name, v) in EMOTION_NAMES.iter().zip(values) {
        if !v.is_finite() || v < 0.0 {
            return Err(data_err(format!(
                "{name} probability {v} is negative or not finite"
            )));
        }
    }
    if !s.offensive.is_finite() || !(0.0..=1.0).contains(&s.offensive) {
        return Err(data_err(format!(
            "offensive probability {} outside [0, 1]",
            s.offensive
        )));
    }
    let sum: f64 = values.iter().sum();
    if sum <= 0.0 {
        return Err(data_err("emotion probabilities sum to zero".into()));
    }
    if (sum - 1.0).abs() <= EMOTION_SUM_TOLERANCE {
        return Ok((s.emotions, false));
    }
    Ok((Emotions::from_array(values.map(|v| v / sum)), true))
}

/// Scores every post: compound sentiment and readability on the raw
/// title + selftext, emotions and offensiveness from `table`.
pub fn attach_external_scores(
    posts: Vec<CleanPost>,
    table: &BTreeMap<String, ExternalScores>,
    lexicon: &Lexicon,
    alpha: f64,
) -> Result<ScoringOutcome> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sentiment alpha must be positive, got {alpha}"
        )));
    }
    let mut warnings = Vec::new();
    let mut out = Vec::with_capacity(posts.len());
    for post in posts {
        let text = post.raw.full_text();
        let compound = compound_sentiment(&text, lexicon, alpha);
        let read = flesch_reading_ease(&text);
        let mut flags = ScoreFlags {
            readability_degenerate: read.degenerate,
            ..Default::default()
        };
        let (emotions, offensive) = match table.get(&post.raw.id) {
            Some(s) => {
                let (emotions, renormalized) = validate_external(&post.raw.id, s)?;
                if renormalized {
                    warnings.push(format!(
                        "post {}: emotion probabilities summed to {}, renormalized",
                        post.raw.id,
                        s.emotions.sum()
                    ));
                }
                flags.renormalized = renormalized;
                (emotions, s.offensive)
            }
            None => {
                flags.defaulted = true;
                (Emotions::NEUTRAL, 0.0)
            }
        };
        out.push(ScoredPost {
            post,
            compound,
            emotions,
            offensive,
            readability: read.score,
            flags,
        });
    }
    Ok(ScoringOutcome {
        posts: out,
        warnings,
    })
}
