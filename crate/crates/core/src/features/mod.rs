//! Time-series features of a relevance panel.
//!
//! A [`FeatureSetSpec`] names the feature families to compute;
//! [`assemble`] realizes it into a [`FeatureMatrix`] with one row per
//! (conference, affiliation) pair for a target year.

mod aif;
mod assemble;
mod forecast;
mod matrix;
mod spec;
mod stats;

pub use aif::{aif_stats, AifContext, AifIndex, AifStats, DEFAULT_AIF_WINDOW};
pub use assemble::{assemble, assemble_detailed, lagged_relevance, COVERAGE_COLUMN, SES_FIT_FALLBACK_ALPHA};
pub use forecast::{
    drift_forecast, ses_fit_alpha, ses_forecast, weighted_moving_average, SesFit, SES_GRID_STEPS,
};
pub use matrix::{
    read_matrix, sidecar_path, write_matrix, FeatureMatrix, ImputationCounters, MatrixSidecar, RowKey,
};
pub use spec::{FeatureSetSpec, DEFAULT_SES_ALPHAS, MAX_WINDOW};
pub use stats::{series_stats, SeriesStats};
