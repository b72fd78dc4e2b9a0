use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use csei_core::analysis::{analyze, AnalysisReport, EventCalendar, FeatureColumns};
use csei_core::index::IndexSeries;
use csei_core::ingest::{read_word_list, FilterConfig, InputFormat};
use csei_core::pipeline::{
    read_clean_posts, read_normalized, run_build, run_ingest, write_clean_posts, AtStage,
    BuildParams, WeightSource,
};
use csei_core::scoring::lexicon::{BUNDLED_BOOSTERS, BUNDLED_NEGATORS, BUNDLED_VALENCES};
use csei_core::scoring::{read_score_table, Lexicon};
use csei_core::{Error, Stage, WeightVector, FEATURE_NAMES};

use crate::config::{PostFormat, RunConfig, WeightMode};
use crate::error::CliError;
use crate::metadata::{AnalyzeCounts, BuildCounts, IngestCounts, RunMetadata, FILE_NAME};
use crate::svg::{Chart, Line, Marker};

pub const LOCK_FILE: &str = ".csei.lock";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Ingest,
    Build,
    Analyze,
}

/// Holds the output-directory lock for the lifetime of a command.
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    pub fn acquire(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::stage(Stage::Output, Error::io(dir, e)))?;
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(DirLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked {
                path: dir.to_path_buf(),
                lock: path,
            }),
            Err(e) => Err(CliError::stage(Stage::Output, Error::io(&path, e))),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn require(key: &'static str, path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::MissingInput {
            key,
            path: path.to_path_buf(),
        })
    }
}

/// Checks every input the requested steps read, before any of them runs.
pub fn check_inputs(cfg: &RunConfig, steps: &[Step]) -> Result<(), CliError> {
    let optional = [
        ("lexicon", &cfg.lexicon),
        ("boosters", &cfg.boosters),
        ("negators", &cfg.negators),
        ("stopwords", &cfg.stopwords),
    ];
    for (key, p) in optional {
        if let Some(p) = p {
            require(key, p)?;
        }
    }
    let first = steps.first().copied();
    if steps.contains(&Step::Ingest) {
        match &cfg.posts {
            Some(p) => require("posts", p)?,
            None => {
                return Err(CliError::Config {
                    message: "`posts` is required for ingest".into(),
                })
            }
        }
    }
    if steps.contains(&Step::Build) {
        if first == Some(Step::Build) {
            require("clean-posts", &cfg.clean_posts_path())?;
        }
        if let Some(p) = &cfg.scores {
            require("scores", p)?;
        }
        if cfg.weight_mode == WeightMode::Load {
            if let Some(p) = &cfg.weights {
                require("weights", p)?;
            }
        }
    }
    if steps.contains(&Step::Analyze) {
        if first == Some(Step::Analyze) {
            require("index", &cfg.index_path())?;
        }
        if let Some(p) = &cfg.events {
            require("events", p)?;
        }
        if let Some(p) = &cfg.normalized {
            require("normalized", p)?;
        }
    }
    Ok(())
}

fn open(path: &Path, stage: Stage) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::stage(stage, Error::io(path, e)))
}

fn write_artifact<F>(dir: &Path, name: &str, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut Vec<u8>) -> csei_core::Result<()>,
{
    let path = dir.join(name);
    let mut buf = Vec::new();
    write(&mut buf).at(Stage::Output)?;
    fs::write(&path, buf).map_err(|e| CliError::stage(Stage::Output, Error::io(&path, e)))
}

fn lexicon(cfg: &RunConfig, stage: Stage) -> Result<Lexicon, CliError> {
    if cfg.lexicon.is_none() && cfg.boosters.is_none() && cfg.negators.is_none() {
        return Ok(Lexicon::bundled());
    }
    let text = |p: &Option<PathBuf>, bundled: &str| -> Result<String, CliError> {
        match p {
            Some(p) => fs::read_to_string(p).map_err(|e| CliError::stage(stage, Error::io(p, e))),
            None => Ok(bundled.to_string()),
        }
    };
    Lexicon::from_readers(
        text(&cfg.lexicon, BUNDLED_VALENCES)?.as_bytes(),
        text(&cfg.boosters, BUNDLED_BOOSTERS)?.as_bytes(),
        text(&cfg.negators, BUNDLED_NEGATORS)?.as_bytes(),
    )
    .at(stage)
    .map_err(CliError::from)
}

fn tag<T: serde::Serialize>(value: T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn assumptions(cfg: &RunConfig) -> BTreeMap<String, String> {
    let mut a = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        a.insert(k.to_string(), v);
    };
    put("covariance_denominator", "n-1".into());
    put(
        "eigenvector_orientation",
        "largest_component_positive".into(),
    );
    put("outlier_granularity", tag(cfg.granularity));
    put("pc_axes_fitted_on", "forest_survivors".into());
    put("constant_feature_policy", "normalize_to_zero".into());
    put("emotion_aggregation", tag(cfg.emotion_agg));
    put("domain_diversity", tag(cfg.diversity));
    put(
        "english_detection",
        format!("lexicon_coverage>={}", cfg.english_threshold),
    );
    put("smoothing", "trailing_full_windows".into());
    put("delta_alignment", "end_date".into());
    put("event_correlate", tag(cfg.correlate));
    put("weight_mode", tag(cfg.weight_mode));
    if cfg.weight_mode == WeightMode::Load {
        put("loaded_weights", "used_verbatim_not_renormalized".into());
    }
    a
}

fn save_metadata(cfg: &RunConfig, update: impl FnOnce(&mut RunMetadata)) -> Result<(), CliError> {
    let mut meta = RunMetadata::load_or_new(&cfg.out);
    meta.tool = env!("CARGO_PKG_NAME").to_string();
    meta.version = env!("CARGO_PKG_VERSION").to_string();
    meta.config = serde_json::to_value(cfg).expect("config serializes");
    meta.assumptions = assumptions(cfg);
    update(&mut meta);
    let (start, end) = match (&meta.build, &meta.ingest) {
        (Some(b), _) if b.first_date.is_some() => (b.first_date, b.last_date),
        (_, Some(i)) => (i.first_post_date, i.last_post_date),
        _ => (meta.timestamps.data_start, meta.timestamps.data_end),
    };
    meta.timestamps.data_start = start;
    meta.timestamps.data_end = end;
    let text = meta.to_json();
    write_artifact(&cfg.out, FILE_NAME, |w| {
        w.extend_from_slice(text.as_bytes());
        Ok(())
    })
}

pub fn ingest(cfg: &RunConfig) -> Result<(), CliError> {
    let posts_path = cfg.posts.as_ref().expect("checked by check_inputs");
    let format = match cfg.format {
        PostFormat::Auto => InputFormat::from_path(posts_path),
        PostFormat::Csv => InputFormat::Csv,
        PostFormat::Jsonl => InputFormat::Jsonl,
    };
    let mut filter = FilterConfig::bundled(cfg.min_date, cfg.max_date);
    filter.english_threshold = cfg.english_threshold;
    if let Some(p) = &cfg.stopwords {
        filter.stopwords = read_word_list(open(p, Stage::Ingest)?).at(Stage::Ingest)?;
    }
    if cfg.stopwords.is_some() || cfg.lexicon.is_some() {
        filter.english_lexicon = lexicon(cfg, Stage::Ingest)?.words().cloned().collect();
        filter
            .english_lexicon
            .extend(filter.stopwords.iter().cloned());
    }
    let out = run_ingest(open(posts_path, Stage::Ingest)?, format, &filter)?;
    write_artifact(&cfg.out, "clean_posts.csv", |w| {
        write_clean_posts(w, &out.survivors)
    })?;
    write_artifact(&cfg.out, "malformed.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["record", "reason"])?;
        for m in &out.malformed {
            c.write_record([m.record.to_string(), m.reason.clone()])?;
        }
        c.flush().map_err(|e| Error::Csv(e.into()))
    })?;
    let counts = IngestCounts {
        ledger: out.ledger,
        first_post_date: out.survivors.iter().map(|p| p.post_date).min(),
        last_post_date: out.survivors.iter().map(|p| p.post_date).max(),
    };
    save_metadata(cfg, |m| m.ingest = Some(counts))
}

pub fn build(cfg: &RunConfig) -> Result<(), CliError> {
    let posts =
        read_clean_posts(open(&cfg.clean_posts_path(), Stage::Scoring)?).at(Stage::Scoring)?;
    let scores = match &cfg.scores {
        Some(p) => read_score_table(open(p, Stage::Scoring)?).at(Stage::Scoring)?,
        None => BTreeMap::new(),
    };
    let weights = match cfg.weight_mode {
        WeightMode::Derive => WeightSource::Derive,
        WeightMode::Load => WeightSource::Load(match &cfg.weights {
            Some(p) => WeightVector::read_csv(open(p, Stage::Index)?).at(Stage::Index)?,
            None => WeightVector::reference(),
        }),
    };
    let params = BuildParams {
        scores,
        lexicon: lexicon(cfg, Stage::Scoring)?,
        alpha: cfg.alpha,
        aggregate: cfg.aggregate_options(),
        outliers: cfg.outlier_config(),
        granularity: cfg.outlier_granularity(),
        weights,
    };
    let b = run_build(posts, &params)?;
    let dir = &cfg.out;
    write_artifact(dir, "features.csv", |w| b.features.write_csv(w))?;
    write_artifact(dir, "outliers.csv", |w| b.outliers.write_csv(w))?;
    write_artifact(dir, "normalized.csv", |w| b.write_normalized(w))?;
    write_artifact(dir, "weights.csv", |w| b.weights.write_csv(w))?;
    write_artifact(dir, "index.csv", |w| b.index.write_csv(w))?;
    write_artifact(dir, "contributions.csv", |w| b.write_contributions(w))?;

    let counts = BuildCounts {
        scored_posts: b.scored_posts,
        defaulted_scores: b.defaulted,
        renormalized_scores: b.renormalized,
        outlier_rows: b.outliers.labels.len(),
        forest_removed: b.outliers.forest_removed(),
        pc_only_removed: b.outliers.pc_only_removed(),
        index_rows: b.index.len(),
        weight_sum: b.weights.sum(),
        explained_variance_ratio: b.weights.explained_variance_ratio,
        constant_features: FEATURE_NAMES
            .iter()
            .zip(&b.normalization.constant)
            .filter(|(_, c)| **c)
            .map(|(n, _)| n.to_string())
            .collect(),
        first_date: b.index.dates.first().copied(),
        last_date: b.index.dates.last().copied(),
        warnings: b.warnings.clone(),
    };
    save_metadata(cfg, |m| m.build = Some(counts))
}

fn feature_columns(
    cfg: &RunConfig,
    series: &IndexSeries,
) -> Result<Option<(Vec<String>, csei_core::Matrix)>, CliError> {
    let path = match &cfg.normalized {
        Some(p) => p.clone(),
        // only pair the default file with the default index
        None if cfg.index.is_none() => {
            let p = cfg.out.join("normalized.csv");
            if !p.is_file() {
                return Ok(None);
            }
            p
        }
        None => return Ok(None),
    };
    let (names, dates, values) =
        read_normalized(open(&path, Stage::Analysis)?).at(Stage::Analysis)?;
    if dates != series.dates {
        return Err(CliError::stage(
            Stage::Analysis,
            Error::Schema(format!(
                "{} does not cover the same dates as the index",
                path.display()
            )),
        ));
    }
    Ok(Some((names, values)))
}

pub fn analyze_step(cfg: &RunConfig) -> Result<(), CliError> {
    let series =
        IndexSeries::read_csv(open(&cfg.index_path(), Stage::Analysis)?).at(Stage::Analysis)?;
    let calendar = match &cfg.events {
        Some(p) => EventCalendar::read_csv(open(p, Stage::Analysis)?).at(Stage::Analysis)?,
        None => EventCalendar::bundled(),
    };
    let features = feature_columns(cfg, &series)?;
    let acfg = cfg.analysis_config();
    let report = analyze(
        &series,
        &calendar,
        features
            .as_ref()
            .map(|(names, values)| FeatureColumns { names, values }),
        &acfg,
    )
    .at(Stage::Analysis)?;

    let dir = &cfg.out;
    write_artifact(dir, "deltas.csv", |w| report.write_deltas(w))?;
    write_artifact(dir, "smoothed.csv", |w| report.write_smoothed(w))?;
    write_artifact(dir, "extrema.csv", |w| report.write_extrema(w))?;
    write_artifact(dir, "cumulative.csv", |w| report.write_cumulative(w))?;
    write_artifact(dir, "event_stats.csv", |w| report.write_event_stats(w))?;
    write_artifact(dir, "correlation_matrix.csv", |w| {
        report.write_correlation_matrix(w)
    })?;
    let summary = report.summary_markdown(&acfg);
    write_artifact(dir, "summary.md", |w| {
        w.extend_from_slice(summary.as_bytes());
        Ok(())
    })?;
    if cfg.plots {
        plots(cfg, &series, &report)?;
    }

    let e = &report.events;
    let counts = AnalyzeCounts {
        index_rows: series.len(),
        deltas: report.deltas.len(),
        smoothed: report.smoothed.len(),
        peaks: report.extrema.peaks.len(),
        valleys: report.extrema.valleys.len(),
        prominence: report.extrema.prominence,
        event_days: report.indicator.marked(),
        uncovered_events: e.uncovered.len(),
        r: e.correlation.map(|c| c.r),
        p_value: e.correlation.map(|c| c.p_value),
        date_gaps: report.gaps.len(),
        warnings: report.warnings.clone(),
    };
    save_metadata(cfg, |m| m.analyze = Some(counts))
}

fn plots(cfg: &RunConfig, series: &IndexSeries, report: &AnalysisReport) -> Result<(), CliError> {
    let dir = cfg.out.join("plots");
    fs::create_dir_all(&dir).map_err(|e| CliError::stage(Stage::Output, Error::io(&dir, e)))?;
    let svg = |name: &str, chart: Chart<'_>| {
        let text = chart.render();
        write_artifact(&dir, name, |w| {
            w.extend_from_slice(text.as_bytes());
            Ok(())
        })
    };
    svg(
        "csei.svg",
        Chart {
            title: "CSEI",
            dates: &series.dates,
            lines: vec![Line {
                name: "csei",
                values: &series.csei,
            }],
            ..Default::default()
        },
    )?;
    let event_positions: Vec<usize> = report
        .indicator
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == 1)
        .map(|(i, _)| i)
        .collect();
    svg(
        "cumulative.svg",
        Chart {
            title: "Cumulative change (dashed: events)",
            dates: &report.cumulative.dates,
            lines: vec![Line {
                name: "cumulative",
                values: &report.cumulative.values,
            }],
            rules: event_positions,
            ..Default::default()
        },
    )?;
    let markers = report
        .extrema
        .peaks
        .iter()
        .map(|p| Marker::Down(p.index))
        .chain(report.extrema.valleys.iter().map(|v| Marker::Up(v.index)))
        .collect();
    svg(
        "smoothed.svg",
        Chart {
            title: "Smoothed daily change with peaks and valleys",
            dates: &report.smoothed.dates,
            lines: vec![Line {
                name: "smoothed",
                values: &report.smoothed.values,
            }],
            markers,
            ..Default::default()
        },
    )?;

    let contrib = cfg.out.join("contributions.csv");
    if cfg.index.is_none() && contrib.is_file() {
        let (names, dates, m) =
            csei_core::aggregate::read_dated_matrix(open(&contrib, Stage::Analysis)?)
                .at(Stage::Analysis)?;
        let cols: Vec<(String, Vec<f64>)> = names
            .iter()
            .enumerate()
            .filter(|(_, n)| n.starts_with("group_"))
            .map(|(j, n)| (n.trim_start_matches("group_").to_string(), m.column(j)))
            .collect();
        // stacked: each line is the running sum of the groups so far
        let mut stacked: Vec<(String, Vec<f64>)> = Vec::new();
        for (name, col) in cols {
            let values = match stacked.last() {
                Some((_, prev)) => prev.iter().zip(&col).map(|(a, b)| a + b).collect(),
                None => col,
            };
            stacked.push((name, values));
        }
        svg(
            "contributions.svg",
            Chart {
                title: "Stacked group contributions",
                dates: &dates,
                lines: stacked
                    .iter()
                    .map(|(n, v)| Line { name: n, values: v })
                    .collect(),
                ..Default::default()
            },
        )?;
    }
    Ok(())
}
