//! Daily feature matrix: one row per calendar day with posts, thirteen
//! feature columns in canonical order.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scoring::ScoredPost;

pub const FEATURE_NAMES: [&str; 13] = [
    "compound_sentiment",
    "daily_total_score",
    "daily_post_count",
    "readability",
    "offensive",
    "domain_diversity",
    "anger",
    "disgust",
    "fear",
    "joy",
    "neutral",
    "sadness",
    "surprise",
];

pub const N_FEATURES: usize = FEATURE_NAMES.len();

/// Column positions of the seven emotions, in [`crate::scoring::EMOTION_NAMES`] order.
const EMOTION_COLUMNS: [usize; 7] = [8, 12, 9, 11, 6, 7, 10];

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmotionAggregation {
    /// Mean of the per-post probabilities.
    #[default]
    MeanProb,
    /// Share of posts whose most probable emotion is each label.
    LabelShare,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiversityMeasure {
    #[default]
    Distinct,
    /// Shannon entropy (nats) of the domain frequency distribution.
    ShannonEntropy,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateOptions {
    pub emotion_agg: EmotionAggregation,
    pub diversity: DiversityMeasure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub dates: Vec<NaiveDate>,
    pub values: Matrix,
}

fn normalize_domain(d: &str) -> Option<String> {
    let d = d.trim().to_lowercase();
    (!d.is_empty()).then_some(d)
}

/// Number of distinct non-empty domains after trimming and lowercasing.
pub fn domain_diversity<'a, I: IntoIterator<Item = &'a str>>(domains: I) -> usize {
    domains
        .into_iter()
        .filter_map(normalize_domain)
        .collect::<BTreeSet<_>>()
        .len()
}

pub fn domain_entropy<'a, I: IntoIterator<Item = &'a str>>(domains: I) -> f64 {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for d in domains.into_iter().filter_map(normalize_domain) {
        *counts.entry(d).or_default() += 1;
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    -counts
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            p * p.ln()
        })
        .sum::<f64>()
}

fn day_row(posts: &[&ScoredPost], opts: AggregateOptions) -> [f64; N_FEATURES] {
    let n = posts.len() as f64;
    let mut row = [0.0; N_FEATURES];
    row[2] = n;
    let mut emotions = [0.0; 7];
    for p in posts {
        row[0] += p.compound;
        row[1] += p.post.raw.score as f64;
        row[3] += p.readability;
        row[4] += p.offensive;
        match opts.emotion_agg {
            EmotionAggregation::MeanProb => {
                for (acc, v) in emotions.iter_mut().zip(p.emotions.to_array()) {
                    *acc += v;
                }
            }
            EmotionAggregation::LabelShare => emotions[p.emotions.dominant()] += 1.0,
        }
    }
    row[0] /= n;
    row[3] /= n;
    row[4] /= n;
    let domains = posts.iter().map(|p| p.post.raw.domain.as_str());
    row[5] = match opts.diversity {
        DiversityMeasure::Distinct => domain_diversity(domains) as f64,
        DiversityMeasure::ShannonEntropy => domain_entropy(domains),
    };
    for (k, col) in EMOTION_COLUMNS.iter().enumerate() {
        row[*col] = emotions[k] / n;
    }
    row
}

/// Groups posts by date and computes the thirteen daily features. Days
/// without posts are absent. Within a day, posts are summed in id order so
/// the result does not depend on input order.
pub fn build_daily_features(posts: &[ScoredPost], opts: AggregateOptions) -> FeatureMatrix {
    let mut by_day: BTreeMap<NaiveDate, Vec<&ScoredPost>> = BTreeMap::new();
    for p in posts {
        by_day.entry(p.post.post_date).or_default().push(p);
    }
    let mut dates = Vec::with_capacity(by_day.len());
    let mut data = Vec::with_capacity(by_day.len() * N_FEATURES);
    for (date, mut day) in by_day {
        day.sort_by(|a, b| a.post.raw.id.cmp(&b.post.raw.id));
        dates.push(date);
        data.extend_from_slice(&day_row(&day, opts));
    }
    let rows = dates.len();
    FeatureMatrix {
        dates,
        values: Matrix::from_row_major(rows, N_FEATURES, data).expect("row width"),
    }
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn without_rows(&self, drop: &[usize]) -> FeatureMatrix {
        let dates = self
            .dates
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, d)| *d)
            .collect();
        FeatureMatrix {
            dates,
            values: self.values.without_rows(drop),
        }
    }

    /// Writes `date` plus the thirteen feature columns.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_dated_matrix(out, &FEATURE_NAMES, &self.dates, &self.values)
    }

    pub fn read_csv<R: Read>(source: R) -> Result<Self> {
        let (names, dates, values) = read_dated_matrix(source)?;
        if names != FEATURE_NAMES {
            return Err(Error::Schema(format!(
                "feature matrix columns must be {FEATURE_NAMES:?}, found {names:?}"
            )));
        }
        Ok(FeatureMatrix { dates, values })
    }
}

/// CSV with a `date` column followed by one column per name.
pub fn write_dated_matrix<W: Write, S: AsRef<str>>(
    out: W,
    names: &[S],
    dates: &[NaiveDate],
    values: &Matrix,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["date".to_string()];
    header.extend(names.iter().map(|s| s.as_ref().to_string()));
    w.write_record(&header)?;
    for (date, row) in dates.iter().zip(values.iter_rows()) {
        let mut rec = vec![date.to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn read_dated_matrix<R: Read>(source: R) -> Result<(Vec<String>, Vec<NaiveDate>, Matrix)> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(source);
    let header = r.headers()?.clone();
    if header.get(0).map(str::trim) != Some("date") {
        return Err(Error::Schema("first column must be `date`".into()));
    }
    let names: Vec<String> = header
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    let mut dates = Vec::new();
    let mut data = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let date: NaiveDate = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("row {}: bad date {:?}", i + 1, &rec[0])))?;
        if dates.last().is_some_and(|d| *d >= date) {
            return Err(Error::Schema(format!(
                "row {}: dates must be strictly increasing",
                i + 1
            )));
        }
        dates.push(date);
        for field in rec.iter().skip(1) {
            data.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Schema(format!("row {}: bad number {field:?}", i + 1)))?,
            );
        }
    }
    let values = Matrix::from_row_major(dates.len(), names.len(), data)?;
    Ok((names, dates, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CleanPost, RawPost};
    use crate::scoring::{Emotions, ScoreFlags};
    use proptest::prelude::*;

    pub(crate) fn scored(
        id: &str,
        date: &str,
        compound: f64,
        score: i64,
        domain: &str,
    ) -> ScoredPost {
        ScoredPost {
            post: CleanPost {
                raw: RawPost {
                    id: id.into(),
                    subreddit_name: String::new(),
                    nsfw: false,
                    created_utc: 0,
                    domain: domain.into(),
                    url: String::new(),
                    selftext: String::new(),
                    title: String::new(),
                    score,
                    kind: String::new(),
                },
                clean_text: String::new(),
                post_date: date.parse().unwrap(),
            },
            compound,
            emotions: Emotions::NEUTRAL,
            offensive: 0.0,
            readability: 50.0,
            flags: ScoreFlags::default(),
        }
    }

    fn col(name: &str) -> usize {
        feature_index(name).unwrap()
    }

    #[test]
    fn emotion_columns_line_up_with_names() {
        for (k, name) in crate::scoring::EMOTION_NAMES.iter().enumerate() {
            assert_eq!(FEATURE_NAMES[EMOTION_COLUMNS[k]], *name);
        }
    }

    #[test]
    fn single_post_day() {
        let m = build_daily_features(
            &[scored("a", "2020-03-01", 0.4, 7, "a.com")],
            AggregateOptions::default(),
        );
        assert_eq!(m.len(), 1);
        let r = m.values.row(0);
        assert_eq!(r[col("daily_post_count")], 1.0);
        assert_eq!(r[col("daily_total_score")], 7.0);
        assert_eq!(r[col("domain_diversity")], 1.0);
        assert_eq!(r[col("compound_sentiment")], 0.4);
        assert_eq!(r[col("neutral")], 1.0);
        assert_eq!(r[col("fear")], 0.0);
    }

    #[test]
    fn same_domain_and_symmetric_compound() {
        let m = build_daily_features(
            &[
                scored("a", "2020-03-01", 0.2, 1, "a.com"),
                scored("b", "2020-03-01", -0.2, 2, "A.com "),
            ],
            AggregateOptions::default(),
        );
        let r = m.values.row(0);
        assert_eq!(r[col("domain_diversity")], 1.0);
        assert_eq!(r[col("compound_sentiment")], 0.0);
        assert_eq!(r[col("daily_total_score")], 3.0);
    }

    #[test]
    fn diversity_counts() {
        assert_eq!(domain_diversity(["A.com", "a.com"]), 1);
        assert_eq!(domain_diversity(Vec::<&str>::new()), 0);
        assert_eq!(domain_diversity(["a.com", "b.org", "b.org", "c.net"]), 3);
        assert_eq!(domain_diversity(["", "  "]), 0);
        let h = domain_entropy(["a", "b"]);
        assert!((h - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(domain_entropy(["a", "a"]), 0.0);
    }

    #[test]
    fn label_share_counts_dominant_labels() {
        let mut a = scored("a", "2020-03-01", 0.0, 0, "x");
        a.emotions = Emotions::from_array([0.6, 0.1, 0.1, 0.0, 0.0, 0.0, 0.2]);
        let b = scored("b", "2020-03-01", 0.0, 0, "x");
        let m = build_daily_features(
            &[a, b],
            AggregateOptions {
                emotion_agg: EmotionAggregation::LabelShare,
                ..Default::default()
            },
        );
        let r = m.values.row(0);
        assert_eq!(r[col("fear")], 0.5);
        assert_eq!(r[col("neutral")], 0.5);
    }

    #[test]
    fn empty_input_gives_empty_matrix() {
        let m = build_daily_features(&[], AggregateOptions::default());
        assert!(m.is_empty());
        assert_eq!(m.values.cols(), N_FEATURES);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let posts = [
            scored("a", "2020-03-01", 0.1234567890123, 3, "x"),
            scored("b", "2020-03-03", -1.0 / 3.0, -2, "y"),
        ];
        let m = build_daily_features(&posts, AggregateOptions::default());
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = FeatureMatrix::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    fn arb_post() -> impl Strategy<Value = (u8, i8, i16, u8, [u8; 7])> {
        (
            0u8..5,
            -100i8..100,
            -50i16..500,
            0u8..4,
            [
                0u8..10,
                0u8..10,
                0u8..10,
                0u8..10,
                0u8..10,
                0u8..10,
                1u8..10,
            ],
        )
    }

    proptest! {
        #[test]
        fn invariants_hold(raw in prop::collection::vec(arb_post(), 1..60), seed in any::<u64>()) {
            let posts: Vec<ScoredPost> = raw.iter().enumerate().map(|(i, (day, c, s, dom, e))| {
                let mut p = scored(&format!("p{i}"), &format!("2020-04-{:02}", 1 + day), *c as f64 / 100.0, *s as i64, &format!("d{dom}.com"));
                let total: f64 = e.iter().map(|v| *v as f64).sum();
                p.emotions = Emotions::from_array(e.map(|v| v as f64 / total));
                p
            }).collect();
            let m = build_daily_features(&posts, AggregateOptions::default());

            let count: f64 = m.values.column(col("daily_post_count")).iter().sum();
            prop_assert_eq!(count as usize, posts.len());
            prop_assert!(m.dates.windows(2).all(|w| w[0] < w[1]));
            for row in m.values.iter_rows() {
                let s: f64 = EMOTION_COLUMNS.iter().map(|c| row[*c]).sum();
                prop_assert!((s - 1.0).abs() < 1e-6);
                prop_assert!(row[col("domain_diversity")] >= 1.0);
            }

            // order independence
            let mut shuffled = posts.clone();
            let mut state = seed | 1;
            for i in (1..shuffled.len()).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                shuffled.swap(i, (state % (i as u64 + 1)) as usize);
            }
            prop_assert_eq!(build_daily_features(&shuffled, AggregateOptions::default()), m);
        }
    }
}
