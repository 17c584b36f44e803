//! Rank research affiliations by their expected relevance at upcoming
//! academic conferences.
//!
//! The pipeline runs in six stages, each a module:
//!
//! - [`ingest`]: parse MAG-style TSV dumps and sample a working corpus
//!   (seed papers, author expansion, citation BFS, degrees, keywords).
//! - [`relevance`]: split each paper's unit score over authors and their
//!   affiliations and lay the result out as a dense
//!   (conference, affiliation, year) panel.
//! - [`features`]: windowed statistics, lags, weighted moving averages,
//!   drift and exponential-smoothing forecasts, author impact factors.
//! - [`similarity`]: Jaccard neighbours of a conference by authors or keywords.
//! - [`models`]: count-proportion baseline, least-squares boosted trees and a
//!   random-intercept mixed model with backward elimination.
//! - [`bench`]: NDCG@k, year-based backtests, the tuning grid and
//!   configuration selection.
//!
//! [`synth`] generates synthetic corpora with persistent affiliation
//! strengths and trends, used by the examples and the acceptance suite.

pub mod bench;
pub mod error;
pub mod features;
pub mod ids;
pub mod ingest;
pub mod models;
pub mod relevance;
pub mod similarity;
pub mod synth;

mod tsv;

pub use error::{Error, Result};
pub use ids::{AffiliationId, AuthorId, ConferenceId, PaperId};
