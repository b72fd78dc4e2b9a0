use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use csei_core::aggregate::{AggregateOptions, DiversityMeasure, EmotionAggregation};
use csei_core::analysis::{AnalysisConfig, Correlate};
use csei_core::ingest::{default_date_window, DEFAULT_ENGLISH_THRESHOLD};
use csei_core::outliers::{OutlierConfig, OutlierGranularity, DEFAULT_CONTAMINATION};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum WeightMode {
    #[default]
    Derive,
    Load,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum EmotionAgg {
    #[default]
    MeanProb,
    LabelShare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Diversity {
    #[default]
    Distinct,
    ShannonEntropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Granularity {
    #[default]
    Daily,
    Post,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum CorrelateWith {
    #[default]
    Delta,
    AbsDelta,
    Smoothed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PostFormat {
    #[default]
    Auto,
    Csv,
    Jsonl,
}

/// Every config key, all optional. The same struct is read from the TOML
/// file and from the command line, and the command line wins.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// Post dump (CSV or JSON lines)
    #[arg(long)]
    pub posts: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<PostFormat>,
    /// External emotion/offensive score table
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Valence lexicon (`token<TAB>valence`)
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub boosters: Option<PathBuf>,
    #[arg(long)]
    pub negators: Option<PathBuf>,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Event calendar (`date,label`)
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Weight file used when weight-mode = load
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Clean-posts file consumed by `build` (default: <out>/clean_posts.csv)
    #[arg(long)]
    pub clean_posts: Option<PathBuf>,
    /// Index file consumed by `analyze` (default: <out>/index.csv)
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Normalized feature file for the correlation matrix (default: <out>/normalized.csv if present)
    #[arg(long)]
    pub normalized: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub min_date: Option<NaiveDate>,
    #[arg(long)]
    pub max_date: Option<NaiveDate>,
    #[arg(long)]
    pub english_threshold: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub emotion_agg: Option<EmotionAgg>,
    #[arg(long)]
    pub diversity: Option<Diversity>,
    #[arg(long)]
    pub granularity: Option<Granularity>,
    #[arg(long)]
    pub n_trees: Option<usize>,
    #[arg(long)]
    pub subsample_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub contamination: Option<f64>,
    #[arg(long)]
    pub pc1_max: Option<f64>,
    #[arg(long)]
    pub pc2_min: Option<f64>,
    #[arg(long)]
    pub weight_mode: Option<WeightMode>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub distance: Option<usize>,
    /// Absolute prominence threshold (default: half the smoothed series' SD)
    #[arg(long)]
    pub prominence: Option<f64>,
    #[arg(long)]
    pub correlate: Option<CorrelateWith>,
    /// Render SVG charts next to the analysis files
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub plots: Option<bool>,
}

macro_rules! overlay {
    ($base:expr, $top:expr; $($f:ident),* $(,)?) => {
        Settings { $($f: $top.$f.clone().or_else(|| $base.$f.clone()),)* }
    };
}

impl Settings {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config {
            message: format!("{}: {}", origin.display(), e.message()),
        })
    }

    /// `self` with every key set in `top` replaced.
    pub fn overlaid(&self, top: &Settings) -> Settings {
        overlay!(self, top;
            posts, format, scores, lexicon, boosters, negators, stopwords, events, weights,
            clean_posts, index, normalized, out, min_date, max_date, english_threshold, alpha,
            emotion_agg, diversity, granularity, n_trees, subsample_size, seed, contamination,
            pc1_max, pc2_min, weight_mode, window, distance, prominence, correlate, plots,
        )
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub posts: Option<PathBuf>,
    pub format: PostFormat,
    pub scores: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub boosters: Option<PathBuf>,
    pub negators: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub clean_posts: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub normalized: Option<PathBuf>,
    /// Left out of the metadata snapshot so two output directories of
    /// the same run compare equal.
    #[serde(skip)]
    pub out: PathBuf,
    pub min_date: NaiveDate,
    pub max_date: NaiveDate,
    pub english_threshold: f64,
    pub alpha: f64,
    pub emotion_agg: EmotionAgg,
    pub diversity: Diversity,
    pub granularity: Granularity,
    pub n_trees: usize,
    pub subsample_size: Option<usize>,
    pub seed: u64,
    pub contamination: f64,
    pub pc1_max: f64,
    pub pc2_min: f64,
    pub weight_mode: WeightMode,
    pub window: usize,
    pub distance: usize,
    pub prominence: Option<f64>,
    pub correlate: CorrelateWith,
    pub plots: bool,
}

fn bad(message: impl Into<String>) -> CliError {
    CliError::Config {
        message: message.into(),
    }
}

impl RunConfig {
    pub fn resolve(s: &Settings) -> Result<Self, CliError> {
        let (min_date, max_date) = default_date_window();
        let forest = OutlierConfig::default();
        let analysis = AnalysisConfig::default();
        let cfg = RunConfig {
            posts: s.posts.clone(),
            format: s.format.unwrap_or_default(),
            scores: s.scores.clone(),
            lexicon: s.lexicon.clone(),
            boosters: s.boosters.clone(),
            negators: s.negators.clone(),
            stopwords: s.stopwords.clone(),
            events: s.events.clone(),
            weights: s.weights.clone(),
            clean_posts: s.clean_posts.clone(),
            index: s.index.clone(),
            normalized: s.normalized.clone(),
            out: s.out.clone().unwrap_or_else(|| PathBuf::from("csei-out")),
            min_date: s.min_date.unwrap_or(min_date),
            max_date: s.max_date.unwrap_or(max_date),
            english_threshold: s.english_threshold.unwrap_or(DEFAULT_ENGLISH_THRESHOLD),
            alpha: s
                .alpha
                .unwrap_or(csei_core::scoring::sentiment::DEFAULT_ALPHA),
            emotion_agg: s.emotion_agg.unwrap_or_default(),
            diversity: s.diversity.unwrap_or_default(),
            granularity: s.granularity.unwrap_or_default(),
            n_trees: s.n_trees.unwrap_or(forest.n_trees),
            subsample_size: s.subsample_size,
            seed: s.seed.unwrap_or(forest.seed),
            contamination: s.contamination.unwrap_or(DEFAULT_CONTAMINATION),
            pc1_max: s.pc1_max.unwrap_or(forest.pc1_max),
            pc2_min: s.pc2_min.unwrap_or(forest.pc2_min),
            weight_mode: s.weight_mode.unwrap_or_default(),
            window: s.window.unwrap_or(analysis.window),
            distance: s.distance.unwrap_or(analysis.distance),
            prominence: s.prominence,
            correlate: s.correlate.unwrap_or_default(),
            plots: s.plots.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.min_date > self.max_date {
            return Err(bad(format!(
                "min-date {} is after max-date {}",
                self.min_date, self.max_date
            )));
        }
        if !(0.0..=1.0).contains(&self.english_threshold) {
            return Err(bad("english-threshold must lie in [0, 1]"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(bad("alpha must be positive"));
        }
        if self.n_trees == 0 {
            return Err(bad("n-trees must be at least 1"));
        }
        if self.subsample_size.is_some_and(|s| s < 2) {
            return Err(bad("subsample-size must be at least 2"));
        }
        if !(0.0..1.0).contains(&self.contamination) {
            return Err(bad("contamination must lie in [0, 1)"));
        }
        if !self.pc1_max.is_finite() || !self.pc2_min.is_finite() {
            return Err(bad("pc1-max and pc2-min must be finite"));
        }
        if self.window == 0 {
            return Err(bad("window must be at least 1"));
        }
        if self.distance == 0 {
            return Err(bad("distance must be at least 1"));
        }
        if self
            .prominence
            .is_some_and(|p| !(p >= 0.0 && p.is_finite()))
        {
            return Err(bad("prominence must be a non-negative number"));
        }
        Ok(())
    }

    pub fn outlier_config(&self) -> OutlierConfig {
        OutlierConfig {
            n_trees: self.n_trees,
            subsample_size: self.subsample_size,
            seed: self.seed,
            contamination: self.contamination,
            pc1_max: self.pc1_max,
            pc2_min: self.pc2_min,
        }
    }

    pub fn aggregate_options(&self) -> AggregateOptions {
        AggregateOptions {
            emotion_agg: match self.emotion_agg {
                EmotionAgg::MeanProb => EmotionAggregation::MeanProb,
                EmotionAgg::LabelShare => EmotionAggregation::LabelShare,
            },
            diversity: match self.diversity {
                Diversity::Distinct => DiversityMeasure::Distinct,
                Diversity::ShannonEntropy => DiversityMeasure::ShannonEntropy,
            },
        }
    }

    pub fn outlier_granularity(&self) -> OutlierGranularity {
        match self.granularity {
            Granularity::Daily => OutlierGranularity::Daily,
            Granularity::Post => OutlierGranularity::Post,
        }
    }

    pub fn analysis_config(&self) -> AnalysisConfig {
        AnalysisConfig {
            window: self.window,
            distance: self.distance,
            prominence: self.prominence,
            correlate: match self.correlate {
                CorrelateWith::Delta => Correlate::Delta,
                CorrelateWith::AbsDelta => Correlate::AbsDelta,
                CorrelateWith::Smoothed => Correlate::Smoothed,
            },
        }
    }

    pub fn clean_posts_path(&self) -> PathBuf {
        self.clean_posts
            .clone()
            .unwrap_or_else(|| self.out.join("clean_posts.csv"))
    }

    pub fn index_path(&self) -> PathBuf {
        self.index
            .clone()
            .unwrap_or_else(|| self.out.join("index.csv"))
    }

    pub fn to_toml(&self) -> String {
        let mut text = toml::to_string_pretty(self).unwrap_or_default();
        text.push_str(&format!(
            "out = {}\n",
            toml::Value::String(self.out.display().to_string())
        ));
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_line_wins() {
        let file = Settings::from_toml("seed = 3\nwindow = 5\n", Path::new("c.toml")).unwrap();
        let cli = Settings {
            seed: Some(9),
            ..Default::default()
        };
        let merged = file.overlaid(&cli);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.window, Some(5));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = Settings::from_toml("sead = 3\n", Path::new("c.toml")).unwrap_err();
        assert!(err.to_string().contains("sead"), "{err}");
    }

    #[test]
    fn enum_and_date_values() {
        let s = Settings::from_toml(
            "emotion-agg = \"label_share\"\ncorrelate = \"abs_delta\"\nmin-date = \"2020-03-01\"\n",
            Path::new("c.toml"),
        )
        .unwrap();
        let cfg = RunConfig::resolve(&s).unwrap();
        assert_eq!(cfg.emotion_agg, EmotionAgg::LabelShare);
        assert_eq!(cfg.correlate, CorrelateWith::AbsDelta);
        assert_eq!(cfg.min_date.to_string(), "2020-03-01");
    }

    #[test]
    fn out_of_range_values_rejected() {
        for bad in [
            "contamination = 1.0",
            "window = 0",
            "n-trees = 0",
            "subsample-size = 1",
            "english-threshold = 1.5",
            "prominence = -0.1",
            "min-date = \"2022-01-01\"",
        ] {
            let s = Settings::from_toml(bad, Path::new("c.toml")).unwrap();
            assert!(RunConfig::resolve(&s).is_err(), "{bad}");
        }
    }

    #[test]
    fn resolved_config_round_trips_through_toml() {
        let cfg = RunConfig::resolve(&Settings::default()).unwrap();
        let text = cfg.to_toml();
        let back =
            RunConfig::resolve(&Settings::from_toml(&text, Path::new("x")).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
