//! Post ingestion: CSV / JSON-lines parsing and the preprocessing filters
//! (deleted markers, bot phrase, text cleaning, English check, date window).

use std::collections::{BTreeSet, HashSet};
use std::io::Read;
use std::sync::OnceLock;

use chrono::{DateTime, NaiveDate};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One post as read from the dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawPost {
    pub id: String,
    pub subreddit_name: String,
    pub nsfw: bool,
    pub created_utc: i64,
    pub domain: String,
    pub url: String,
    pub selftext: String,
    pub title: String,
    pub score: i64,
    #[serde(rename = "type")]
    pub kind: String,
}

impl RawPost {
    /// Title and selftext joined by a single space; the text-based filters
    /// and scorers run on this.
    pub fn full_text(&self) -> String {
        match (self.title.is_empty(), self.selftext.is_empty()) {
            (false, false) => format!("{} {}", self.title, self.selftext),
            (false, true) => self.title.clone(),
            (true, _) => self.selftext.clone(),
        }
    }

    pub fn post_date(&self) -> Option<NaiveDate> {
        DateTime::from_timestamp(self.created_utc, 0).map(|dt| dt.date_naive())
    }
}

/// A post that survived the text filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanPost {
    #[serde(flatten)]
    pub raw: RawPost,
    pub clean_text: String,
    pub post_date: NaiveDate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Jsonl,
}

impl InputFormat {
    /// Guesses the format from a file extension; anything but `.jsonl`/`.json`/`.ndjson` is CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => InputFormat::Jsonl,
            _ => InputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalformedRecord {
    /// 1-based record number (data rows for CSV, lines for JSONL).
    pub record: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub posts: Vec<RawPost>,
    pub malformed: Vec<MalformedRecord>,
}

const REQUIRED: [&str; 6] = ["id", "created_utc", "score", "domain", "selftext", "title"];

#[derive(Debug, Clone, Copy)]
enum Field {
    Id,
    Subreddit,
    Nsfw,
    Created,
    Domain,
    Url,
    Selftext,
    Title,
    Score,
    Kind,
}

fn field_for(name: &str) -> Option<Field> {
    Some(match name.trim() {
        "id" => Field::Id,
        "subreddit_name" | "subreddit.name" => Field::Subreddit,
        "nsfw" | "subreddit.nsfw" => Field::Nsfw,
        "created_utc" => Field::Created,
        "domain" => Field::Domain,
        "url" => Field::Url,
        "selftext" => Field::Selftext,
        "title" => Field::Title,
        "score" => Field::Score,
        "type" => Field::Kind,
        _ => return None,
    })
}

fn parse_timestamp(s: &str) -> std::result::Result<i64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<i64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v.abs() < 1e15 => Ok(v.floor() as i64),
        _ => Err(format!("created_utc {s:?} is not a numeric timestamp")),
    }
}

fn parse_score(s: &str) -> std::result::Result<i64, String> {
    let s = s.trim();
    s.parse::<i64>()
        .or_else(|_| match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v.fract() == 0.0 => Ok(v as i64),
            _ => Err(()),
        })
        .map_err(|_| format!("score {s:?} is not an integer"))
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "" | "false" | "0" | "f" | "no" => Ok(false),
        "true" | "1" | "t" | "yes" => Ok(true),
        other => Err(format!("nsfw {other:?} is not a boolean")),
    }
}

#[derive(Default)]
struct PostBuilder {
    post: Option<RawPost>,
}

impl PostBuilder {
    fn new() -> Self {
        PostBuilder {
            post: Some(RawPost {
                id: String::new(),
                subreddit_name: String::new(),
                nsfw: false,
                created_utc: 0,
                domain: String::new(),
                url: String::new(),
                selftext: String::new(),
                title: String::new(),
                score: 0,
                kind: String::new(),
            }),
        }
    }

    fn set(&mut self, field: Field, value: &str) -> std::result::Result<(), String> {
        let p = self.post.as_mut().expect("builder consumed");
        match field {
            Field::Id => p.id = value.to_string(),
            Field::Subreddit => p.subreddit_name = value.to_string(),
            Field::Nsfw => p.nsfw = parse_bool(value)?,
            Field::Created => p.created_utc = parse_timestamp(value)?,
            Field::Domain => p.domain = value.to_string(),
            Field::Url => p.url = value.to_string(),
            Field::Selftext => p.selftext = value.to_string(),
            Field::Title => p.title = value.to_string(),
            Field::Score => p.score = parse_score(value)?,
            Field::Kind => p.kind = value.to_string(),
        }
        Ok(())
    }

    fn finish(mut self, seen: &mut HashSet<String>) -> std::result::Result<RawPost, String> {
        let p = self.post.take().expect("builder consumed");
        if p.id.trim().is_empty() {
            return Err("empty id".into());
        }
        if p.post_date().is_none() {
            return Err(format!("created_utc {} is out of range", p.created_utc));
        }
        if !seen.insert(p.id.clone()) {
            return Err(format!("duplicate id {:?}", p.id));
        }
        Ok(p)
    }
}

/// Parses posts from `source`.
///
/// Records that fail to parse are skipped and listed in
/// [`ParseOutcome::malformed`]; a missing required column or an unreadable
/// source aborts the whole parse.
pub fn parse_posts<R: Read>(source: R, format: InputFormat) -> Result<ParseOutcome> {
    match format {
        InputFormat::Csv => parse_csv(source),
        InputFormat::Jsonl => parse_jsonl(source),
    }
}

fn parse_csv<R: Read>(source: R) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(source);
    let headers = reader
        .byte_headers()
        .map_err(|e| Error::Ingest(format!("cannot read header: {e}")))?
        .clone();
    let headers: Vec<String> = headers
        .iter()
        .map(|h| {
            String::from_utf8_lossy(h)
                .trim_start_matches('\u{feff}')
                .to_string()
        })
        .collect();
    let fields: Vec<Option<Field>> = headers.iter().map(|h| field_for(h)).collect();
    for req in REQUIRED {
        if !headers
            .iter()
            .any(|h| field_for(h).is_some() && h.trim() == req)
        {
            return Err(Error::Schema(format!("missing required column {req:?}")));
        }
    }

    let mut out = ParseOutcome::default();
    let mut seen = HashSet::new();
    let mut record = csv::ByteRecord::new();
    let mut n = 0;
    loop {
        match reader.read_byte_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                n += 1;
                match csv_record(&record, &fields, &mut seen) {
                    Ok(post) => out.posts.push(post),
                    Err(reason) => out.malformed.push(MalformedRecord { record: n, reason }),
                }
            }
            Err(e) if e.is_io_error() => {
                return Err(Error::Ingest(format!("read failed: {e}")));
            }
            Err(e) => {
                n += 1;
                out.malformed.push(MalformedRecord {
                    record: n,
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

fn csv_record(
    record: &csv::ByteRecord,
    fields: &[Option<Field>],
    seen: &mut HashSet<String>,
) -> std::result::Result<RawPost, String> {
    if record.len() != fields.len() {
        return Err(format!(
            "expected {} fields, found {}",
            fields.len(),
            record.len()
        ));
    }
    let mut b = PostBuilder::new();
    for (raw, field) in record.iter().zip(fields) {
        if let Some(field) = field {
            let value = std::str::from_utf8(raw).map_err(|_| "invalid UTF-8".to_string())?;
            b.set(*field, value)?;
        }
    }
    b.finish(seen)
}

fn parse_jsonl<R: Read>(source: R) -> Result<ParseOutcome> {
    let mut buf = Vec::new();
    let mut source = source;
    source
        .read_to_end(&mut buf)
        .map_err(|e| Error::Ingest(format!("read failed: {e}")))?;

    let mut out = ParseOutcome::default();
    let mut seen = HashSet::new();
    let mut checked_schema = false;
    for (i, line) in buf.split(|b| *b == b'\n').enumerate() {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let value: serde_json::Value = match serde_json::from_slice(line) {
            Ok(v) => v,
            Err(e) => {
                out.malformed.push(MalformedRecord {
                    record: i + 1,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let Some(obj) = value.as_object() else {
            out.malformed.push(MalformedRecord {
                record: i + 1,
                reason: "line is not a JSON object".into(),
            });
            continue;
        };
        // Keys are checked against the first well-formed object, the JSONL
        // analogue of a header row.
        if !checked_schema {
            for req in REQUIRED {
                if !obj.contains_key(req) {
                    return Err(Error::Schema(format!("missing required key {req:?}")));
                }
            }
            checked_schema = true;
        }
        match json_record(obj, &mut seen) {
            Ok(post) => out.posts.push(post),
            Err(reason) => out.malformed.push(MalformedRecord {
                record: i + 1,
                reason,
            }),
        }
    }
    Ok(out)
}

fn json_record(
    obj: &serde_json::Map<String, serde_json::Value>,
    seen: &mut HashSet<String>,
) -> std::result::Result<RawPost, String> {
    use serde_json::Value;
    let mut b = PostBuilder::new();
    for (key, value) in obj {
        let Some(field) = field_for(key) else {
            continue;
        };
        let text = match value {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            Value::Bool(v) => v.to_string(),
            Value::Number(n) => n.to_string(),
            _ => return Err(format!("field {key:?} has a non-scalar value")),
        };
        b.set(field, &text)?;
    }
    for req in REQUIRED {
        if !obj.contains_key(req) {
            return Err(format!("missing key {req:?}"));
        }
    }
    b.finish(seen)
}

/// True when the selftext is exactly a deletion marker (after trimming).
pub fn is_deleted(post: &RawPost) -> bool {
    matches!(post.selftext.trim(), "[deleted]" | "[removed]")
}

const BOT_PHRASE: &str = "i am a bot";

/// Case-insensitive substring test for the bot phrase in selftext or title.
pub fn is_bot(post: &RawPost) -> bool {
    post.selftext.to_lowercase().contains(BOT_PHRASE)
        || post.title.to_lowercase().contains(BOT_PHRASE)
}

struct CleanPatterns {
    url: Regex,
    hashtag: Regex,
    mention: Regex,
    digits: Regex,
    non_alpha: Regex,
}

fn patterns() -> &'static CleanPatterns {
    static PATTERNS: OnceLock<CleanPatterns> = OnceLock::new();
    PATTERNS.get_or_init(|| CleanPatterns {
        url: Regex::new(r"(?i)(?:\b[a-z][a-z0-9+.\-]*://|\bwww\.)\S*").unwrap(),
        hashtag: Regex::new(r"#\w+").unwrap(),
        mention: Regex::new(r"@\w+").unwrap(),
        digits: Regex::new(r"[0-9]+").unwrap(),
        non_alpha: Regex::new(r"[^A-Za-z]+").unwrap(),
    })
}

/// Normalizes text for the filters: drops URLs, hashtags, mentions and
/// digits, replaces every other non-alphabetic character by a space,
/// lowercases and removes stopwords.
pub fn clean_text(text: &str, stopwords: &BTreeSet<String>) -> String {
    let p = patterns();
    let s = p.url.replace_all(text, " ");
    let s = p.hashtag.replace_all(&s, " ");
    let s = p.mention.replace_all(&s, " ");
    let s = p.digits.replace_all(&s, " ");
    let s = p.non_alpha.replace_all(&s, " ");
    let s = s.to_lowercase();
    s.split_whitespace()
        .filter(|t| !stopwords.contains(*t))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Default minimum lexicon coverage for the English check.
pub const DEFAULT_ENGLISH_THRESHOLD: f64 = 0.30;

/// Lexicon-coverage English check on cleaned text. Empty text is not English.
pub fn is_english(text: &str, lexicon: &BTreeSet<String>, threshold: f64) -> bool {
    let mut total = 0usize;
    let mut hits = 0usize;
    for tok in text.split_whitespace() {
        total += 1;
        if lexicon.contains(tok) {
            hits += 1;
        }
    }
    total > 0 && hits as f64 / total as f64 >= threshold
}

pub fn in_date_window(post: &CleanPost, min_date: NaiveDate, max_date: NaiveDate) -> bool {
    min_date <= post.post_date && post.post_date <= max_date
}

/// Reads a one-token-per-line word list, lowercasing and skipping blanks
/// and `#` comments.
pub fn read_word_list<R: Read>(mut source: R) -> Result<BTreeSet<String>> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::Ingest(format!("word list: {e}")))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect())
}

pub const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Inclusive default date window.
pub fn default_date_window() -> (NaiveDate, NaiveDate) {
    (
        NaiveDate::from_ymd_opt(2020, 2, 11).expect("valid date"),
        NaiveDate::from_ymd_opt(2021, 10, 25).expect("valid date"),
    )
}

pub fn bundled_stopwords() -> BTreeSet<String> {
    read_word_list(BUNDLED_STOPWORDS.as_bytes()).expect("bundled stopwords")
}

#[derive(Debug, Clone)]
pub struct FilterConfig {
    pub min_date: NaiveDate,
    pub max_date: NaiveDate,
    pub english_threshold: f64,
    pub stopwords: BTreeSet<String>,
    pub english_lexicon: BTreeSet<String>,
}

impl FilterConfig {
    /// Bundled stopwords; the English word set is the sentiment lexicon
    /// plus the stopwords.
    pub fn bundled(min_date: NaiveDate, max_date: NaiveDate) -> Self {
        let stopwords = bundled_stopwords();
        let mut english_lexicon: BTreeSet<String> = crate::scoring::Lexicon::bundled()
            .words()
            .cloned()
            .collect();
        english_lexicon.extend(stopwords.iter().cloned());
        FilterConfig {
            min_date,
            max_date,
            english_threshold: DEFAULT_ENGLISH_THRESHOLD,
            stopwords,
            english_lexicon,
        }
    }
}

/// Per-rule removal counts. Rules apply in order and each post is counted
/// under the first rule that removes it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalLedger {
    pub malformed: usize,
    pub ingested: usize,
    pub deleted: usize,
    pub removed: usize,
    pub bot: usize,
    pub non_english: usize,
    pub out_of_window: usize,
    pub survivors: usize,
}

impl RemovalLedger {
    pub fn total_removed(&self) -> usize {
        self.deleted + self.removed + self.bot + self.non_english + self.out_of_window
    }

    /// `ingested = survivors + Σ removals`.
    pub fn balances(&self) -> bool {
        self.ingested == self.survivors + self.total_removed()
    }
}

#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub survivors: Vec<CleanPost>,
    pub ledger: RemovalLedger,
}

/// Runs the preprocessing filters over parsed posts, preserving input order.
pub fn filter_posts(posts: Vec<RawPost>, config: &FilterConfig) -> Result<FilterOutcome> {
    if config.min_date > config.max_date {
        return Err(Error::InvalidParameter(format!(
            "min_date {} is after max_date {}",
            config.min_date, config.max_date
        )));
    }
    if !(0.0..=1.0).contains(&config.english_threshold) {
        return Err(Error::InvalidParameter(format!(
            "english threshold {} outside [0, 1]",
            config.english_threshold
        )));
    }
    let mut ledger = RemovalLedger {
        ingested: posts.len(),
        ..Default::default()
    };
    let mut survivors = Vec::with_capacity(posts.len());
    for post in posts {
        if is_deleted(&post) {
            if post.selftext.trim() == "[deleted]" {
                ledger.deleted += 1;
            } else {
                ledger.removed += 1;
            }
            continue;
        }
        if is_bot(&post) {
            ledger.bot += 1;
            continue;
        }
        let clean = clean_text(&post.full_text(), &config.stopwords);
        if !is_english(&clean, &config.english_lexicon, config.english_threshold) {
            ledger.non_english += 1;
            continue;
        }
        let post_date = post.post_date().ok_or_else(|| Error::Data {
            id: post.id.clone(),
            message: "created_utc out of range".into(),
        })?;
        let clean = CleanPost {
            raw: post,
            clean_text: clean,
            post_date,
        };
        if !in_date_window(&clean, config.min_date, config.max_date) {
            ledger.out_of_window += 1;
            continue;
        }
        survivors.push(clean);
    }
    ledger.survivors = survivors.len();
    Ok(FilterOutcome { survivors, ledger })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str =
        "id,subreddit.name,subreddit.nsfw,created_utc,domain,url,selftext,title,score,type\n";

    fn post(selftext: &str, title: &str) -> RawPost {
        RawPost {
            id: "p1".into(),
            subreddit_name: "coronavirus".into(),
            nsfw: false,
            created_utc: 1_581_379_200, // 2020-02-11
            domain: "self.coronavirus".into(),
            url: String::new(),
            selftext: selftext.into(),
            title: title.into(),
            score: 1,
            kind: "post".into(),
        }
    }

    fn words(ws: &[&str]) -> BTreeSet<String> {
        ws.iter().map(|s| s.to_string()).collect()
    }

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn csv_row_maps_every_field() {
        let data = format!(
            "{HEADER}abc,Coronavirus,true,1584000000,cnn.com,https://cnn.com/x,\"body, with comma\",A title,-3,post\n"
        );
        let out = parse_posts(data.as_bytes(), InputFormat::Csv).unwrap();
        assert!(out.malformed.is_empty());
        assert_eq!(
            out.posts,
            vec![RawPost {
                id: "abc".into(),
                subreddit_name: "Coronavirus".into(),
                nsfw: true,
                created_utc: 1_584_000_000,
                domain: "cnn.com".into(),
                url: "https://cnn.com/x".into(),
                selftext: "body, with comma".into(),
                title: "A title".into(),
                score: -3,
                kind: "post".into(),
            }]
        );
    }

    #[test]
    fn header_only_is_empty() {
        let out = parse_posts(HEADER.as_bytes(), InputFormat::Csv).unwrap();
        assert!(out.posts.is_empty());
        assert!(out.malformed.is_empty());
    }

    #[test]
    fn non_numeric_timestamp_is_counted_and_parsing_continues() {
        let data = format!(
            "{HEADER}a,s,false,yesterday,d,u,t,t,1,post\nb,s,false,1584000000,d,u,t,t,1,post\n"
        );
        let out = parse_posts(data.as_bytes(), InputFormat::Csv).unwrap();
        assert_eq!(out.posts.len(), 1);
        assert_eq!(out.posts[0].id, "b");
        assert_eq!(out.malformed.len(), 1);
        assert_eq!(out.malformed[0].record, 1);
    }

    #[test]
    fn duplicate_and_empty_ids_are_malformed() {
        let data = format!(
            "{HEADER}a,s,false,1584000000,d,u,t,t,1,post\na,s,false,1584000000,d,u,t,t,1,post\n,s,false,1584000000,d,u,t,t,1,post\n"
        );
        let out = parse_posts(data.as_bytes(), InputFormat::Csv).unwrap();
        assert_eq!(out.posts.len(), 1);
        assert_eq!(out.malformed.len(), 2);
    }

    #[test]
    fn missing_required_column_is_schema_error() {
        let data = "id,created_utc,domain,selftext,title\n";
        let err = parse_posts(data.as_bytes(), InputFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::Schema(ref m) if m.contains("score")));
    }

    #[test]
    fn jsonl_parses_and_counts_junk() {
        let data = concat!(
            r#"{"id":"a","subreddit.name":"c","subreddit.nsfw":false,"created_utc":1584000000,"domain":"x.com","url":"","selftext":"hi","title":"t","score":5,"type":"post"}"#,
            "\n",
            "not json\n",
            "\n",
            r#"{"id":"b","created_utc":"1584000000.0","domain":"y","selftext":"","title":"t","score":-1}"#,
            "\n"
        );
        let out = parse_posts(data.as_bytes(), InputFormat::Jsonl).unwrap();
        assert_eq!(out.posts.len(), 2);
        assert_eq!(out.posts[1].score, -1);
        assert_eq!(out.malformed.len(), 1);
        assert_eq!(out.malformed[0].record, 2);
    }

    #[test]
    fn deletion_markers() {
        assert!(is_deleted(&post("[deleted]", "")));
        assert!(is_deleted(&post("  [removed]\n", "")));
        assert!(!is_deleted(&post("we removed the couch", "")));
        assert!(!is_deleted(&post("", "[deleted]")));
    }

    #[test]
    fn bot_phrase() {
        assert!(is_bot(&post("...I am a bot, beep boop...", "")));
        assert!(is_bot(&post("I am a botanist", "")));
        assert!(is_bot(&post("", "I AM A BOT")));
        assert!(!is_bot(&post("bots are everywhere", "")));
    }

    #[test]
    fn clean_text_applies_rules_in_order() {
        assert_eq!(
            clean_text(
                "Check https://x.co #covid @user 123 NOW!",
                &words(&["check"])
            ),
            "now"
        );
        assert_eq!(clean_text("", &words(&[])), "");
        assert_eq!(clean_text("the and of", &words(&["the", "and", "of"])), "");
        assert_eq!(
            clean_text("see www.who.int/news, it's COVID19 time", &words(&[])),
            "see it s covid time"
        );
    }

    #[test]
    fn english_coverage() {
        let lex = words(&["good", "bad", "virus"]);
        assert!(is_english("good bad", &lex, 0.3));
        assert!(!is_english("", &lex, 0.3));
        assert!(!is_english("good a b c d e f g h i", &lex, 0.3));
        assert!(is_english("good a b", &lex, 0.3));
    }

    #[test]
    fn date_window_is_inclusive() {
        let mut c = CleanPost {
            raw: post("", "t"),
            clean_text: String::new(),
            post_date: d("2020-02-11"),
        };
        let (lo, hi) = (d("2020-02-11"), d("2021-10-25"));
        assert!(in_date_window(&c, lo, hi));
        c.post_date = d("2019-11-30");
        assert!(!in_date_window(&c, lo, hi));
        c.post_date = hi;
        assert!(in_date_window(&c, lo, hi));
    }

    #[test]
    fn filter_pipeline_counts_each_rule() {
        let cfg = FilterConfig {
            min_date: d("2020-02-11"),
            max_date: d("2021-10-25"),
            english_threshold: 0.3,
            stopwords: words(&["the"]),
            english_lexicon: words(&["good", "virus"]),
        };
        let mut posts = vec![
            post("good virus", "the"),
            post("[deleted]", "good"),
            post("[removed]", "good"),
            post("I am a bot", "good"),
            post("qwerty zxcv", "asdf"),
            post("good", "virus"),
        ];
        posts[5].created_utc = 1_500_000_000;
        for (i, p) in posts.iter_mut().enumerate() {
            p.id = format!("p{i}");
        }
        let out = filter_posts(posts, &cfg).unwrap();
        assert_eq!(out.survivors.len(), 1);
        assert_eq!(out.survivors[0].clean_text, "good virus");
        let l = &out.ledger;
        assert_eq!(
            (l.deleted, l.removed, l.bot, l.non_english, l.out_of_window),
            (1, 1, 1, 1, 1)
        );
        assert!(l.balances());
    }
}
