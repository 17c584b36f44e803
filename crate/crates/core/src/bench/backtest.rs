use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::ndcg::{ndcg_at_k, NdcgReport, RankedList};
use crate::error::{Error, Result};
use crate::features::{assemble, AifContext, FeatureMatrix, FeatureSetSpec};
use crate::ids::{AffiliationId, ConferenceId};
use crate::models::{backward_eliminate, gbdt_fit, group_labels, prob_fit, GbdtConfig, MixedConfig, ProbModel};
use crate::relevance::RelevancePanel;

/// Paper-count window of the probabilities baseline, in years.
pub const BASELINE_YEARS: i32 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelFamily {
    Gbdt(GbdtConfig),
    Mixed {
        #[serde(default)]
        config: MixedConfig,
        /// Backward-elimination significance level.
        #[serde(default = "default_level")]
        level: f64,
    },
    Prob,
}

fn default_level() -> f64 {
    0.05
}

impl Default for ModelFamily {
    fn default() -> Self {
        ModelFamily::Gbdt(GbdtConfig::default())
    }
}

impl ModelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ModelFamily::Gbdt(_) => "gbdt",
            ModelFamily::Mixed { .. } => "mixed",
            ModelFamily::Prob => "prob",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Feasible(NdcgReport),
    Infeasible { reason: String },
}

impl Outcome {
    pub fn ndcg(&self) -> Option<f64> {
        match self {
            Outcome::Feasible(r) => Some(r.ndcg),
            Outcome::Infeasible { .. } => None,
        }
    }

    fn infeasible(reason: impl Into<String>) -> Self {
        Outcome::Infeasible { reason: reason.into() }
    }
}

/// One backtest: train on target years `train_years`, rank the main
/// conference's affiliations for `validation_year`, score against the panel.
#[derive(Debug, Clone)]
pub struct Backtest<'a> {
    pub panel: &'a RelevancePanel,
    pub conference: &'a ConferenceId,
    /// Conferences whose rows are pooled into training only.
    pub related: &'a [ConferenceId],
    pub features: &'a FeatureSetSpec,
    pub family: &'a ModelFamily,
    pub train_years: RangeInclusive<i32>,
    pub validation_year: i32,
    pub k: usize,
    pub aif: Option<&'a AifContext>,
}

impl Backtest<'_> {
    /// Target years in `train_years` whose full feature window lies inside
    /// the panel.
    pub fn feasible_train_years(&self) -> Vec<i32> {
        let earliest = self.panel.first_year() + self.features.max_window().max(1) as i32;
        let latest = self.panel.last_year().min(self.validation_year - 1);
        self.train_years
            .clone()
            .filter(|&t| t >= earliest && t <= latest)
            .collect()
    }

    pub fn run(&self) -> Result<Outcome> {
        if self.panel.conference_index(self.conference).is_none() {
            return Err(Error::UnknownConference(self.conference.clone()));
        }
        if let Some(reason) = self.validation_guard() {
            return Ok(Outcome::infeasible(reason));
        }
        if let ModelFamily::Prob = self.family {
            return baseline(self.panel, self.conference, self.validation_year, self.k);
        }
        let years = self.feasible_train_years();
        if years.is_empty() {
            return Ok(Outcome::infeasible(format!(
                "no training target year in {:?} has {} years of history",
                self.train_years,
                self.features.max_window()
            )));
        }
        let mut pooled = vec![self.conference.clone()];
        pooled.extend(self.related.iter().filter(|c| *c != self.conference).cloned());
        let parts = years
            .iter()
            .map(|&t| assemble(self.panel, self.features, &pooled, t, self.aif))
            .collect::<Result<Vec<_>>>()?;
        let train = FeatureMatrix::vstack(&parts)?;
        let test = assemble(
            self.panel,
            self.features,
            std::slice::from_ref(self.conference),
            self.validation_year,
            self.aif,
        )?;
        let predictions = match self.family {
            ModelFamily::Gbdt(cfg) => gbdt_fit(&train, cfg)?.predict(&test)?,
            ModelFamily::Mixed { config, level } => {
                let groups = group_labels(&train);
                match backward_eliminate(&train, &groups, config, *level) {
                    Ok(model) => model.predict(&test)?,
                    Err(e @ (Error::NonConvergence { .. } | Error::RankDeficient(_))) => {
                        return Ok(Outcome::infeasible(format!("mixed model fit failed: {e}")));
                    }
                    Err(e) => return Err(e),
                }
            }
            ModelFamily::Prob => unreachable!("handled above"),
        };
        let scores = test
            .keys()
            .iter()
            .map(|k| k.affiliation.clone())
            .zip(predictions)
            .collect();
        score_ranking(self.panel, self.conference, self.validation_year, scores, self.k).map(Outcome::Feasible)
    }

    fn validation_guard(&self) -> Option<String> {
        let v = self.validation_year;
        if v <= *self.train_years.end() {
            return Some(format!("validation year {v} does not follow the training years {:?}", self.train_years));
        }
        if v <= self.panel.first_year() || v > self.panel.last_year() {
            return Some(format!(
                "validation year {v} has no known truth and history in panel {}..={}",
                self.panel.first_year(),
                self.panel.last_year()
            ));
        }
        None
    }
}

/// Ranks `scores` with the submission tie-break and scores it against the
/// panel slice of `year`.
pub fn score_ranking(
    panel: &RelevancePanel,
    conference: &ConferenceId,
    year: i32,
    scores: Vec<(AffiliationId, f64)>,
    k: usize,
) -> Result<NdcgReport> {
    let ci = panel
        .conference_index(conference)
        .ok_or_else(|| Error::UnknownConference(conference.clone()))?;
    let truth = panel
        .year_slice(ci, year)
        .ok_or_else(|| Error::InvalidParameter(format!("year {year} outside the panel")))?;
    let recent = panel.year_slice(ci, year - 1).unwrap_or_default();
    let list = RankedList::rank(conference.clone(), year, scores, &recent)?;
    ndcg_at_k(&list, &truth, k)
}

/// Paper-count shares of the main conference over the `BASELINE_YEARS`
/// years before `year` (clipped to the panel).
pub fn baseline_model(panel: &RelevancePanel, conference: &ConferenceId, year: i32) -> Result<ProbModel> {
    let ci = panel
        .conference_index(conference)
        .ok_or_else(|| Error::UnknownConference(conference.clone()))?;
    let lo = (year - BASELINE_YEARS).max(panel.first_year());
    let hi = (year - 1).min(panel.last_year());
    if lo > hi {
        return Err(Error::InsufficientHistory(format!("no panel year before {year}")));
    }
    let (a, b) = (
        panel.year_index(lo).expect("clipped to panel"),
        panel.year_index(hi).expect("clipped to panel"),
    );
    let counts: BTreeMap<AffiliationId, u64> = panel
        .affiliations()
        .iter()
        .enumerate()
        .map(|(ai, aff)| {
            let n: u64 = panel.count_series(ci, ai)[a..=b].iter().map(|&c| u64::from(c)).sum();
            (aff.clone(), n)
        })
        .collect();
    prob_fit(&counts, (lo, hi))
}

/// NDCG of the probabilities baseline for `year`.
pub fn baseline(panel: &RelevancePanel, conference: &ConferenceId, year: i32, k: usize) -> Result<Outcome> {
    if year <= panel.first_year() || year > panel.last_year() {
        return Ok(Outcome::infeasible(format!("year {year} has no history or no truth in the panel")));
    }
    let model = match baseline_model(panel, conference, year) {
        Ok(m) => m,
        Err(Error::EmptyInput(_)) | Err(Error::InsufficientHistory(_)) => {
            return Ok(Outcome::infeasible(format!("no papers in the baseline window before {year}")));
        }
        Err(e) => return Err(e),
    };
    let scores = model.scores.into_iter().collect();
    score_ranking(panel, conference, year, scores, k).map(Outcome::Feasible)
}
