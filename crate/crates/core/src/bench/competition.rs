use serde::{Deserialize, Serialize};

use super::backtest::{baseline, Backtest, ModelFamily, Outcome};
use super::grid::{feature_families, feature_set_combinations, grid_search, select_config, BacktestReport, GridConfig, NamedFeatureSet, Selection};
use super::ndcg::DEFAULT_K;
use crate::error::{Error, Result};
use crate::ids::ConferenceId;
use crate::ingest::{sample_corpus, SampleParams};
use crate::models::GbdtConfig;
use crate::relevance::{build_panel, PaperFilter, PanelOptions, RelevancePanel};
use crate::similarity::{build_profiles, related_conferences, Neighbor, RelatedOptions, SimilarityBasis};
use crate::synth::{generate, SynthConfig};

/// A full synthetic run: generate, sample, build the panel, pick related
/// conferences, tune on the validation years and score the winner on a
/// held-out final year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompetitionSetup {
    pub synth: SynthConfig,
    /// Index of the main conference among the generated ones.
    pub target: usize,
    pub basis: SimilarityBasis,
    pub feature_sets: Vec<NamedFeatureSet>,
    pub related_counts: Vec<usize>,
    pub validation_years: Vec<i32>,
    pub held_out_year: i32,
    pub family: ModelFamily,
    pub filter: PaperFilter,
    pub train_window: Option<usize>,
    pub k: usize,
}

impl Default for CompetitionSetup {
    fn default() -> Self {
        let synth = SynthConfig::default();
        let last = synth.first_year + synth.n_years as i32 - 1;
        Self {
            synth,
            target: 0,
            basis: SimilarityBasis::Authors,
            feature_sets: default_feature_sets(),
            related_counts: vec![0, 5],
            validation_years: vec![last - 3, last - 2, last - 1],
            held_out_year: last,
            family: ModelFamily::Gbdt(GbdtConfig::default()),
            filter: PaperFilter::AllPapers,
            train_window: None,
            k: DEFAULT_K,
        }
    }
}

/// Each single feature family plus the trend-pair combinations that won
/// the tuning in practice.
pub fn default_feature_sets() -> Vec<NamedFeatureSet> {
    const COMBOS: [&str; 3] = ["sw_y+dt_es", "w_y+dt_es", "sw_y+w_y+dt_es"];
    feature_set_combinations(&feature_families())
        .into_iter()
        .filter(|s| !s.name.contains('+') || COMBOS.contains(&s.name.as_str()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitionResult {
    pub conference: ConferenceId,
    pub related: Vec<Neighbor>,
    pub report: BacktestReport,
    pub selection: Selection,
    pub held_out_year: i32,
    pub held_out: Outcome,
    pub held_out_baseline: Outcome,
}

impl CompetitionResult {
    pub fn held_out_ndcg(&self) -> Option<f64> {
        self.held_out.ndcg()
    }
}

pub fn synthetic_panel(setup: &CompetitionSetup) -> Result<(RelevancePanel, Vec<Neighbor>)> {
    let corpus = generate(&setup.synth)?;
    let target = corpus
        .conferences
        .get(setup.target)
        .cloned()
        .ok_or_else(|| Error::InvalidParameter(format!("target index {} out of range", setup.target)))?;
    let mut params = SampleParams::new(corpus.conferences.iter().cloned());
    params.seed_years = (*corpus.years.start(), *corpus.years.end());
    params.author_floor_year = *corpus.years.start();
    params.bfs_depth = 1;
    let snapshot = sample_corpus(&corpus.raw, &params)?;
    let panel = build_panel(
        &snapshot,
        &corpus.conferences,
        corpus.years.clone(),
        setup.filter,
        &PanelOptions::default(),
    )?;
    let profiles = build_profiles(&snapshot, corpus.years.clone());
    let max_related = setup.related_counts.iter().copied().max().unwrap_or(0);
    let related = related_conferences(&target, &profiles, max_related, setup.basis, RelatedOptions::default())?;
    Ok((panel, related))
}

pub fn run_competition(setup: &CompetitionSetup) -> Result<CompetitionResult> {
    let (panel, related) = synthetic_panel(setup)?;
    let conference = panel.conferences()[setup.target].clone();
    let grid = GridConfig {
        conference: conference.clone(),
        related: related.iter().map(|n| n.conference.clone()).collect(),
        feature_sets: setup.feature_sets.clone(),
        related_counts: setup.related_counts.clone(),
        validation_years: setup.validation_years.clone(),
        family: setup.family.clone(),
        train_window: setup.train_window,
        k: setup.k,
    };
    let report = grid_search(&panel, &grid, None)?;
    let selection = select_config(&report)?;
    let held_out = match &selection {
        Selection::Config {
            feature_set,
            related_count,
            ..
        } => {
            let spec = &setup
                .feature_sets
                .iter()
                .find(|s| &s.name == feature_set)
                .expect("selected from the grid")
                .spec;
            let used = (*related_count).min(grid.related.len());
            Backtest {
                panel: &panel,
                conference: &conference,
                related: &grid.related[..used],
                features: spec,
                family: &setup.family,
                train_years: panel.first_year() + 1..=setup.held_out_year - 1,
                validation_year: setup.held_out_year,
                k: setup.k,
                aif: None,
            }
            .run()?
        }
        Selection::BaselineFallback { .. } => baseline(&panel, &conference, setup.held_out_year, setup.k)?,
    };
    let held_out_baseline = baseline(&panel, &conference, setup.held_out_year, setup.k)?;
    Ok(CompetitionResult {
        conference,
        related,
        report,
        selection,
        held_out_year: setup.held_out_year,
        held_out,
        held_out_baseline,
    })
}
