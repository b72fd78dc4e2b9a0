//! Daily sentiment-and-engagement index over subreddit posts.
//!
//! The pipeline runs ingest, scoring, daily aggregation, outlier removal,
//! PCA weighting and event analysis. Each stage is usable on its own.

pub mod aggregate;
pub mod analysis;
pub mod error;
pub mod fixture;
pub mod index;
pub mod ingest;
pub mod linalg;
pub mod outliers;
pub mod pipeline;
pub mod scoring;

pub use aggregate::{FeatureMatrix, FEATURE_NAMES, N_FEATURES};
pub use error::{Error, Result};
pub use index::{IndexSeries, WeightVector};
pub use ingest::{CleanPost, RawPost};
pub use linalg::Matrix;
pub use pipeline::{Stage, StageError};
pub use scoring::{Emotions, ScoredPost};
