//! Deterministic synthetic posts and score tables for tests, benches and
//! demos. Planted rows exercise every preprocessing filter.

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::index::IndexSeries;
use crate::ingest::{default_date_window, FilterConfig};
use crate::scoring::Lexicon;

const DOMAINS: [&str; 8] = [
    "self.coronavirus",
    "cnn.com",
    "bbc.co.uk",
    "reuters.com",
    "nytimes.com",
    "youtube.com",
    "i.redd.it",
    "twitter.com",
];

const TOPIC_WORDS: [&str; 12] = [
    "vaccine", "mask", "lockdown", "cases", "hospital", "news", "week", "city", "testing", "data",
    "county", "update",
];

const FILLER: [&str; 10] = [
    "the", "and", "of", "to", "in", "is", "we", "this", "for", "with",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSpec {
    pub posts: usize,
    pub seed: u64,
    pub start: NaiveDate,
    pub days: u64,
    pub deleted: usize,
    pub removed: usize,
    pub bot: usize,
    pub out_of_window: usize,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec {
            posts: 1000,
            seed: 20200211,
            start: default_date_window().0,
            days: 60,
            deleted: 3,
            removed: 2,
            bot: 4,
            out_of_window: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    /// Post dump in the ingest CSV schema.
    pub posts_csv: String,
    /// `id,fear,surprise,joy,sadness,anger,disgust,neutral,offensive`
    pub scores_csv: String,
}

#[derive(Clone, Copy, PartialEq)]
enum Plant {
    None,
    Deleted,
    Removed,
    Bot,
    OutOfWindow,
}

fn sentence(rng: &mut ChaCha8Rng, positive: &[&str], negative: &[&str], mood: f64) -> String {
    let n = rng.random_range(4..10);
    let mut words: Vec<&str> = Vec::with_capacity(n);
    let mut lexical = 0;
    for k in 0..n {
        let r: f64 = rng.random();
        // at least as many lexicon words as topic words keeps the text English
        if r < 0.25 {
            words.push(FILLER[rng.random_range(0..FILLER.len())]);
        } else if r < 0.45 && lexical > 0 && k > 0 {
            words.push(TOPIC_WORDS[rng.random_range(0..TOPIC_WORDS.len())]);
            lexical -= 1;
        } else {
            let pool = if rng.random::<f64>() < mood {
                positive
            } else {
                negative
            };
            words.push(pool[rng.random_range(0..pool.len())]);
            lexical += 1;
        }
    }
    let mut s = words.join(" ");
    if let Some(c) = s.get_mut(0..1) {
        c.make_ascii_uppercase();
    }
    s.push(if rng.random::<f64>() < 0.15 { '!' } else { '.' });
    s
}

/// Builds the fixture. Output depends only on `spec`.
pub fn generate(spec: &FixtureSpec) -> Fixture {
    let planted_total = spec.deleted + spec.removed + spec.bot + spec.out_of_window;
    assert!(planted_total <= spec.posts, "more planted rows than posts");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let lexicon = Lexicon::bundled();
    let positive: Vec<&str> = lexicon
        .entries
        .iter()
        .filter(|(_, v)| **v > 0.0)
        .map(|(k, _)| k.as_str())
        .collect();
    let negative: Vec<&str> = lexicon
        .entries
        .iter()
        .filter(|(_, v)| **v < 0.0)
        .map(|(k, _)| k.as_str())
        .collect();

    let mut plants = vec![Plant::None; spec.posts];
    let mut slots: Vec<usize> = (0..spec.posts).collect();
    slots.shuffle(&mut rng);
    let mut it = slots.into_iter();
    for (kind, count) in [
        (Plant::Deleted, spec.deleted),
        (Plant::Removed, spec.removed),
        (Plant::Bot, spec.bot),
        (Plant::OutOfWindow, spec.out_of_window),
    ] {
        for i in it.by_ref().take(count) {
            plants[i] = kind;
        }
    }

    let epoch0 = spec
        .start
        .and_hms_opt(0, 0, 0)
        .expect("midnight")
        .and_utc()
        .timestamp();
    let early = default_date_window().0 - Days::new(70);
    let early0 = early
        .and_hms_opt(0, 0, 0)
        .expect("midnight")
        .and_utc()
        .timestamp();

    let mut posts = csv::Writer::from_writer(Vec::new());
    posts
        .write_record([
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
        ])
        .expect("in-memory write");
    let mut scores = csv::Writer::from_writer(Vec::new());
    scores
        .write_record([
            "id",
            "fear",
            "surprise",
            "joy",
            "sadness",
            "anger",
            "disgust",
            "neutral",
            "offensive",
        ])
        .expect("in-memory write");

    for (i, plant) in plants.iter().enumerate() {
        let id = format!("p{i:05}");
        // volume and mood drift slowly over the window
        let day = rng.random_range(0..spec.days.max(1));
        let phase = day as f64 / spec.days.max(1) as f64 * std::f64::consts::TAU;
        let mood = 0.5 + 0.3 * phase.sin();
        let created = if *plant == Plant::OutOfWindow {
            early0 + rng.random_range(0..30 * 86_400)
        } else {
            epoch0 + day as i64 * 86_400 + rng.random_range(0..86_400)
        };
        let domain = DOMAINS[rng.random_range(0..DOMAINS.len())];
        let title = sentence(&mut rng, &positive, &negative, mood);
        let body: Vec<String> = (0..rng.random_range(1..4))
            .map(|_| sentence(&mut rng, &positive, &negative, mood))
            .collect();
        let selftext = match plant {
            Plant::Deleted => "[deleted]".to_string(),
            Plant::Removed => "[removed]".to_string(),
            Plant::Bot => format!(
                "{} I am a bot, and this action was performed automatically.",
                body[0]
            ),
            _ => body.join(" "),
        };
        let score: i64 = (rng.random::<f64>().powi(3) * 800.0 * (1.0 + phase.cos().abs())) as i64;
        posts
            .write_record([
                id.as_str(),
                "coronavirus",
                "false",
                &created.to_string(),
                domain,
                &format!("https://{domain}/{id}"),
                &selftext,
                &title,
                &score.to_string(),
                "post",
            ])
            .expect("in-memory write");

        let mut emo: [f64; 7] = std::array::from_fn(|_| rng.random::<f64>());
        emo[2] += mood; // joy
        emo[3] += 1.0 - mood; // sadness
        let total: f64 = emo.iter().sum();
        let emo = emo.map(|v| v / total);
        let offensive = (rng.random::<f64>() * 0.3 * 1e4).round() / 1e4;
        let mut rec: Vec<String> = vec![id];
        rec.extend(emo.iter().map(|v| v.to_string()));
        rec.push(offensive.to_string());
        scores.write_record(&rec).expect("in-memory write");
    }

    let finish = |w: csv::Writer<Vec<u8>>| {
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    };
    Fixture {
        posts_csv: finish(posts),
        scores_csv: finish(scores),
    }
}

/// Filter configuration matching the fixture: bundled word lists and the
/// default date window.
pub fn default_filter() -> FilterConfig {
    let (min, max) = default_date_window();
    FilterConfig::bundled(min, max)
}

/// A smooth random-walk index with one value per day from `start` to `end`
/// inclusive, clamped to [0, 1].
pub fn synthetic_index(start: NaiveDate, end: NaiveDate, seed: u64) -> IndexSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dates = Vec::new();
    let mut csei = Vec::new();
    let mut x: f64 = 0.5;
    let mut d = start;
    while d <= end {
        x = (x + rng.random_range(-0.03..0.03)).clamp(0.0, 1.0);
        dates.push(d);
        csei.push(x);
        d = d + Days::new(1);
    }
    IndexSeries { dates, csei }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::InputFormat;
    use crate::pipeline::run_ingest;

    #[test]
    fn planted_counts_come_back() {
        let fx = generate(&FixtureSpec::default());
        let out = run_ingest(fx.posts_csv.as_bytes(), InputFormat::Csv, &default_filter()).unwrap();
        let l = out.ledger;
        assert_eq!(
            (
                l.ingested,
                l.deleted,
                l.removed,
                l.bot,
                l.out_of_window,
                l.non_english
            ),
            (1000, 3, 2, 4, 5, 0)
        );
        assert_eq!(l.survivors, 986);
        assert!(l.balances());
        assert_eq!(l.malformed, 0);
    }

    #[test]
    fn deterministic() {
        let a = generate(&FixtureSpec::default());
        assert_eq!(a, generate(&FixtureSpec::default()));
        let b = generate(&FixtureSpec {
            seed: 1,
            ..Default::default()
        });
        assert_ne!(a.posts_csv, b.posts_csv);
    }

    #[test]
    fn score_rows_sum_to_one() {
        let fx = generate(&FixtureSpec {
            posts: 50,
            ..Default::default()
        });
        let table = crate::scoring::read_score_table(fx.scores_csv.as_bytes()).unwrap();
        assert_eq!(table.len(), 50);
        for s in table.values() {
            assert!((s.emotions.sum() - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn index_covers_range() {
        let s = synthetic_index(
            NaiveDate::from_ymd_opt(2020, 2, 11).unwrap(),
            NaiveDate::from_ymd_opt(2021, 10, 25).unwrap(),
            3,
        );
        assert_eq!(s.len(), 623);
        assert!(s.csei.iter().all(|c| (0.0..=1.0).contains(c)));
    }
}
