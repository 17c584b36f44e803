use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::backtest::{baseline, Backtest, ModelFamily, Outcome};
use super::ndcg::DEFAULT_K;
use crate::error::{Error, Result};
use crate::features::{AifContext, FeatureSetSpec, DEFAULT_SES_ALPHAS};
use crate::ids::ConferenceId;
use crate::relevance::RelevancePanel;
use crate::tsv;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFeatureSet {
    pub name: String,
    pub spec: FeatureSetSpec,
}

impl NamedFeatureSet {
    pub fn new(name: impl Into<String>, spec: FeatureSetSpec) -> Self {
        Self { name: name.into(), spec }
    }
}

/// The five feature families combined by the tuning grid: full-history
/// stats, windowed stats, raw lags, drift plus fitted smoothing, and
/// fixed-α smoothing.
pub fn feature_families() -> Vec<NamedFeatureSet> {
    vec![
        NamedFeatureSet::new(
            "s_y",
            FeatureSetSpec {
                all_history_stats: true,
                ..FeatureSetSpec::default()
            },
        ),
        NamedFeatureSet::new(
            "sw_y",
            FeatureSetSpec {
                stat_windows: vec![2, 3, 4],
                ..FeatureSetSpec::default()
            },
        ),
        NamedFeatureSet::new(
            "w_y",
            FeatureSetSpec {
                lag_windows: vec![4],
                ..FeatureSetSpec::default()
            },
        ),
        NamedFeatureSet::new(
            "dt_es",
            FeatureSetSpec {
                drift: true,
                ses_fitted: true,
                ..FeatureSetSpec::default()
            },
        ),
        NamedFeatureSet::new(
            "es_a",
            FeatureSetSpec {
                ses_alphas: DEFAULT_SES_ALPHAS.to_vec(),
                ..FeatureSetSpec::default()
            },
        ),
    ]
}

/// Union of two feature sets.
pub fn union_spec(a: &FeatureSetSpec, b: &FeatureSetSpec) -> FeatureSetSpec {
    let merge = |x: &[usize], y: &[usize]| {
        let mut v: Vec<usize> = x.iter().chain(y).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut alphas: Vec<f64> = a.ses_alphas.iter().chain(&b.ses_alphas).copied().collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    FeatureSetSpec {
        lag_windows: merge(&a.lag_windows, &b.lag_windows),
        stat_windows: merge(&a.stat_windows, &b.stat_windows),
        all_history_stats: a.all_history_stats || b.all_history_stats,
        wma_windows: merge(&a.wma_windows, &b.wma_windows),
        drift: a.drift || b.drift,
        ses_alphas: alphas,
        ses_fitted: a.ses_fitted || b.ses_fitted,
        aif: a.aif || b.aif,
    }
}

/// Every nonempty combination of `families`, named by joining member names
/// with `+`, in order of size and then of family position.
pub fn feature_set_combinations(families: &[NamedFeatureSet]) -> Vec<NamedFeatureSet> {
    let n = families.len();
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|&m| (m.count_ones(), std::cmp::Reverse(m.reverse_bits())));
    masks
        .into_iter()
        .map(|mask| {
            let members: Vec<&NamedFeatureSet> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &families[i]).collect();
            let name = members.iter().map(|m| m.name.as_str()).collect::<Vec<_>>().join("+");
            let spec = members
                .iter()
                .fold(FeatureSetSpec::default(), |acc, m| union_spec(&acc, &m.spec));
            NamedFeatureSet { name, spec }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub conference: ConferenceId,
    /// Candidate related conferences, most similar first; a related count
    /// of r uses the first r.
    #[serde(default)]
    pub related: Vec<ConferenceId>,
    pub feature_sets: Vec<NamedFeatureSet>,
    pub related_counts: Vec<usize>,
    pub validation_years: Vec<i32>,
    #[serde(default)]
    pub family: ModelFamily,
    /// Number of training target years before each validation year; all
    /// feasible years when absent.
    #[serde(default)]
    pub train_window: Option<usize>,
    #[serde(default = "default_k")]
    pub k: usize,
}

fn default_k() -> usize {
    DEFAULT_K
}

impl GridConfig {
    pub fn n_cells(&self) -> usize {
        self.feature_sets.len() * self.related_counts.len() * self.validation_years.len()
    }

    fn train_years(&self, panel: &RelevancePanel, validation_year: i32) -> std::ops::RangeInclusive<i32> {
        let hi = validation_year - 1;
        let lo = match self.train_window {
            Some(w) => hi - w as i32 + 1,
            None => panel.first_year() + 1,
        };
        lo..=hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub feature_set: String,
    pub feature_count: usize,
    pub related_count: usize,
    /// Related conferences actually pooled (fewer when the list is short).
    pub related_used: usize,
    pub year: i32,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineCell {
    pub year: i32,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub conference: ConferenceId,
    pub k: usize,
    pub family: ModelFamily,
    pub cells: Vec<GridCell>,
    pub baseline: Vec<BaselineCell>,
}

/// Evaluates every (feature set, related count, validation year) cell of
/// `grid` plus the baseline per year. Cells run in parallel; the report
/// lists them in grid order.
pub fn grid_search(panel: &RelevancePanel, grid: &GridConfig, aif: Option<&AifContext>) -> Result<BacktestReport> {
    if grid.n_cells() == 0 {
        return Err(Error::EmptyInput("grid needs feature sets, related counts and validation years"));
    }
    if panel.conference_index(&grid.conference).is_none() {
        return Err(Error::UnknownConference(grid.conference.clone()));
    }
    for set in &grid.feature_sets {
        set.spec.validate()?;
    }
    let related: Vec<ConferenceId> = grid
        .related
        .iter()
        .filter(|c| **c != grid.conference && panel.conference_index(c).is_some())
        .cloned()
        .collect();

    let mut jobs = Vec::with_capacity(grid.n_cells());
    for set in &grid.feature_sets {
        for &count in &grid.related_counts {
            for &year in &grid.validation_years {
                jobs.push((set, count, year));
            }
        }
    }
    let cells = jobs
        .par_iter()
        .map(|&(set, count, year)| {
            let used = count.min(related.len());
            let outcome = Backtest {
                panel,
                conference: &grid.conference,
                related: &related[..used],
                features: &set.spec,
                family: &grid.family,
                train_years: grid.train_years(panel, year),
                validation_year: year,
                k: grid.k,
                aif,
            }
            .run()?;
            log::debug!("{} related={count} year={year}: {:?}", set.name, outcome.ndcg());
            Ok(GridCell {
                feature_set: set.name.clone(),
                feature_count: set.spec.feature_count(),
                related_count: count,
                related_used: used,
                year,
                outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut years = grid.validation_years.clone();
    years.sort_unstable();
    years.dedup();
    let baseline = years
        .iter()
        .map(|&year| {
            Ok(BaselineCell {
                year,
                outcome: baseline(panel, &grid.conference, year, grid.k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BacktestReport {
        conference: grid.conference.clone(),
        k: grid.k,
        family: grid.family.clone(),
        cells,
        baseline,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "choice", rename_all = "snake_case")]
pub enum Selection {
    Config {
        feature_set: String,
        related_count: usize,
        feature_count: usize,
        mean_ndcg: f64,
        ndcg_by_year: BTreeMap<i32, f64>,
    },
    /// No configuration matched the baseline in every feasible year.
    BaselineFallback {
        mean_ndcg: f64,
        ndcg_by_year: BTreeMap<i32, f64>,
    },
}

impl Selection {
    pub fn is_fallback(&self) -> bool {
        matches!(self, Selection::BaselineFallback { .. })
    }
}

impl BacktestReport {
    /// Distinct (feature set, related count) pairs in report order.
    pub fn configs(&self) -> Vec<(&str, usize)> {
        let mut out: Vec<(&str, usize)> = Vec::new();
        for c in &self.cells {
            let key = (c.feature_set.as_str(), c.related_count);
            if !out.contains(&key) {
                out.push(key);
            }
        }
        out
    }

    pub fn config_cells<'a>(&'a self, feature_set: &'a str, related_count: usize) -> impl Iterator<Item = &'a GridCell> {
        self.cells
            .iter()
            .filter(move |c| c.feature_set == feature_set && c.related_count == related_count)
    }

    pub fn baseline_ndcg(&self, year: i32) -> Option<f64> {
        self.baseline.iter().find(|b| b.year == year).and_then(|b| b.outcome.ndcg())
    }

    /// Every cell of the configuration is feasible and at least matches the
    /// baseline wherever the baseline is feasible.
    pub fn dominates_baseline(&self, feature_set: &str, related_count: usize) -> bool {
        let mut any = false;
        for cell in self.config_cells(feature_set, related_count) {
            any = true;
            let Some(ndcg) = cell.outcome.ndcg() else { return false };
            if let Some(base) = self.baseline_ndcg(cell.year) {
                if ndcg < base {
                    return false;
                }
            }
        }
        any
    }
}

/// Mean NDCG, feature count, related count, feature set, NDCG by year.
type Candidate<'a> = (f64, usize, usize, &'a str, BTreeMap<i32, f64>);

/// Among configurations that dominate the baseline, the one with the best
/// mean NDCG; ties go to fewer features, then fewer related conferences,
/// then the feature-set name. Falls back to the baseline when none
/// dominates, and fails with [`Error::InsufficientHistory`] when no
/// configuration is feasible in every year.
pub fn select_config(report: &BacktestReport) -> Result<Selection> {
    if report.cells.is_empty() {
        return Err(Error::EmptyInput("report has no cells"));
    }
    let feasible: Vec<(&str, usize)> = report
        .configs()
        .into_iter()
        .filter(|&(f, r)| report.config_cells(f, r).all(|c| c.outcome.ndcg().is_some()))
        .collect();
    if feasible.is_empty() {
        return Err(Error::InsufficientHistory(
            "no configuration is feasible in every validation year".into(),
        ));
    }
    let mut best: Option<Candidate> = None;
    for (f, r) in feasible {
        if !report.dominates_baseline(f, r) {
            continue;
        }
        let by_year: BTreeMap<i32, f64> = report
            .config_cells(f, r)
            .map(|c| (c.year, c.outcome.ndcg().expect("feasible")))
            .collect();
        let mean = by_year.values().sum::<f64>() / by_year.len() as f64;
        let count = report.config_cells(f, r).next().map_or(0, |c| c.feature_count);
        let better = match &best {
            None => true,
            Some((bm, bc, br, bf, _)) => mean
                .total_cmp(bm)
                .then_with(|| bc.cmp(&count))
                .then_with(|| br.cmp(&r))
                .then_with(|| bf.cmp(&f))
                .is_gt(),
        };
        if better {
            best = Some((mean, count, r, f, by_year));
        }
    }
    Ok(match best {
        Some((mean_ndcg, feature_count, related_count, f, ndcg_by_year)) => Selection::Config {
            feature_set: f.to_string(),
            related_count,
            feature_count,
            mean_ndcg,
            ndcg_by_year,
        },
        None => {
            let ndcg_by_year: BTreeMap<i32, f64> = report
                .baseline
                .iter()
                .filter_map(|b| b.outcome.ndcg().map(|n| (b.year, n)))
                .collect();
            let mean_ndcg = if ndcg_by_year.is_empty() {
                0.0
            } else {
                ndcg_by_year.values().sum::<f64>() / ndcg_by_year.len() as f64
            };
            Selection::BaselineFallback { mean_ndcg, ndcg_by_year }
        }
    })
}

pub fn write_report(path: &Path, report: &BacktestReport) -> Result<()> {
    tsv::write_json(path, report)
}

pub fn read_report(path: &Path) -> Result<BacktestReport> {
    tsv::read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::NdcgReport;

    fn ok(year: i32, ndcg: f64) -> Outcome {
        Outcome::Feasible(NdcgReport {
            conference: "c".into(),
            year,
            k: 20,
            dcg: ndcg,
            idcg: 1.0,
            ndcg,
            degenerate: false,
        })
    }

    fn cell(set: &str, count: usize, features: usize, year: i32, ndcg: f64) -> GridCell {
        GridCell {
            feature_set: set.into(),
            feature_count: features,
            related_count: count,
            related_used: count,
            year,
            outcome: ok(year, ndcg),
        }
    }

    fn report(cells: Vec<GridCell>, base: &[(i32, f64)]) -> BacktestReport {
        BacktestReport {
            conference: "c".into(),
            k: 20,
            family: ModelFamily::default(),
            cells,
            baseline: base.iter().map(|&(year, n)| BaselineCell { year, outcome: ok(year, n) }).collect(),
        }
    }

    #[test]
    fn sole_dominator_wins() {
        let r = report(
            vec![
                cell("a", 0, 3, 2014, 0.9),
                cell("a", 0, 3, 2015, 0.9),
                cell("b", 0, 2, 2014, 0.95),
                cell("b", 0, 2, 2015, 0.7),
            ],
            &[(2014, 0.8), (2015, 0.8)],
        );
        match select_config(&r).unwrap() {
            Selection::Config { feature_set, .. } => assert_eq!(feature_set, "a"),
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn fallback_when_nothing_dominates() {
        let r = report(vec![cell("a", 0, 3, 2014, 0.5)], &[(2014, 0.8)]);
        assert!(select_config(&r).unwrap().is_fallback());
    }

    #[test]
    fn equal_means_prefer_fewer_features_then_fewer_related() {
        let r = report(
            vec![
                cell("big", 0, 9, 2014, 0.9),
                cell("small", 5, 4, 2014, 0.9),
                cell("small", 0, 4, 2014, 0.9),
            ],
            &[(2014, 0.8)],
        );
        match select_config(&r).unwrap() {
            Selection::Config {
                feature_set,
                related_count,
                ..
            } => {
                assert_eq!(feature_set, "small");
                assert_eq!(related_count, 0);
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn empty_report_is_an_error() {
        assert!(select_config(&report(vec![], &[])).is_err());
    }

    #[test]
    fn combinations_cover_power_set() {
        let combos = feature_set_combinations(&feature_families());
        assert_eq!(combos.len(), 31);
        assert_eq!(combos[0].name, "s_y");
        assert_eq!(combos.last().unwrap().name, "s_y+sw_y+w_y+dt_es+es_a");
        let all = &combos.last().unwrap().spec;
        assert!(all.drift && all.ses_fitted && all.all_history_stats);
    }
}
