use rayon::prelude::*;

use super::aif::AifContext;
use super::forecast::{drift_forecast, ses_fit_alpha, ses_forecast, weighted_moving_average};
use super::matrix::{FeatureMatrix, ImputationCounters, RowKey};
use super::spec::FeatureSetSpec;
use super::stats::series_stats;
use crate::error::{Error, Result};
use crate::ids::{AffiliationId, ConferenceId};
use crate::relevance::RelevancePanel;

/// Smoothing parameter used for `ses_fit` when the history is too short to fit.
pub const SES_FIT_FALLBACK_ALPHA: f64 = 0.5;

/// Relevance of one pair at `target_year - 1, ..., target_year - window`.
///
/// Lags before the panel's first year are zero when `zero_extend` is set and
/// an error otherwise.
pub fn lagged_relevance(
    panel: &RelevancePanel,
    conference: &ConferenceId,
    affiliation: &AffiliationId,
    target_year: i32,
    window: usize,
    zero_extend: bool,
) -> Result<Vec<f64>> {
    let c = panel
        .conference_index(conference)
        .ok_or_else(|| Error::UnknownConference(conference.clone()))?;
    let a = panel
        .affiliation_index(affiliation)
        .ok_or_else(|| Error::InvalidParameter(format!("affiliation {affiliation} not in panel")))?;
    if target_year > panel.last_year() + 1 {
        return Err(Error::InvalidParameter(format!(
            "target year {target_year} is more than one year past the panel"
        )));
    }
    let series = panel.series(c, a);
    (1..=window)
        .map(|k| {
            let year = target_year - k as i32;
            match panel.year_index(year) {
                Some(y) => Ok(series[y]),
                None if zero_extend => Ok(0.0),
                None => Err(Error::LagOutOfRange {
                    target_year,
                    lag: k,
                    first_year: panel.first_year(),
                }),
            }
        })
        .collect()
}

/// `k`-th most recent value of `history` (1-based), zero past its start.
fn lag(history: &[f64], k: usize) -> f64 {
    if k <= history.len() {
        history[history.len() - k]
    } else {
        0.0
    }
}

fn lags(history: &[f64], window: usize) -> Vec<f64> {
    (1..=window).map(|k| lag(history, k)).collect()
}

struct RowFlags {
    ses_fallback: bool,
    aif_absent: bool,
}

fn row_features(
    history: &[f64],
    spec: &FeatureSetSpec,
    aif: Option<super::aif::AifStats>,
    coverage: Option<f64>,
) -> Result<(Vec<f64>, RowFlags)> {
    let mut out = Vec::new();
    let mut flags = RowFlags {
        ses_fallback: false,
        aif_absent: false,
    };
    out.extend(lags(history, spec.lag_depth()));
    for w in spec.sorted_stat_windows() {
        out.extend(series_stats(&lags(history, w))?.values());
    }
    if spec.all_history_stats {
        out.extend(series_stats(history)?.values());
    }
    for w in spec.sorted_wma_windows() {
        out.push(weighted_moving_average(&lags(history, w), w)?);
    }
    if spec.drift {
        out.push(drift_forecast(history));
    }
    for a in spec.sorted_alphas() {
        out.push(ses_forecast(history, a)?);
    }
    if spec.ses_fitted {
        match ses_fit_alpha(history) {
            Ok(fit) => out.push(fit.forecast),
            Err(_) => {
                flags.ses_fallback = true;
                out.push(ses_forecast(history, SES_FIT_FALLBACK_ALPHA)?);
            }
        }
    }
    if spec.aif {
        let stats = aif.unwrap_or_default();
        flags.aif_absent = !stats.present;
        out.extend(stats.stats.values());
        out.push(if stats.present { 1.0 } else { 0.0 });
    }
    if let Some(c) = coverage {
        out.push(c);
    }
    Ok((out, flags))
}

/// Name of the column added when a window reaches before the panel start.
pub const COVERAGE_COLUMN: &str = "coverage";

/// Computes the features of every (conference, affiliation) pair for
/// `target_year` from the history before it. See [`assemble_detailed`].
pub fn assemble(
    panel: &RelevancePanel,
    spec: &FeatureSetSpec,
    conferences: &[ConferenceId],
    target_year: i32,
    aif: Option<&AifContext>,
) -> Result<FeatureMatrix> {
    assemble_detailed(panel, spec, conferences, target_year, aif).map(|(m, _)| m)
}

/// Builds one row per (conference, affiliation) for the listed conferences
/// (main conference first, related ones after), in that order and then by
/// affiliation id.
///
/// History is every panel year before `target_year`. When the deepest window
/// reaches before the panel start, missing years are read as zero and a
/// [`COVERAGE_COLUMN`] holding the number of real years in that window is
/// appended. Targets are the panel relevance at `target_year`, or absent when
/// `target_year` is the year after the panel.
pub fn assemble_detailed(
    panel: &RelevancePanel,
    spec: &FeatureSetSpec,
    conferences: &[ConferenceId],
    target_year: i32,
    aif: Option<&AifContext>,
) -> Result<(FeatureMatrix, ImputationCounters)> {
    spec.validate()?;
    if target_year <= panel.first_year() {
        return Err(Error::InsufficientHistory(format!(
            "target year {target_year} has no preceding year in a panel starting {}",
            panel.first_year()
        )));
    }
    if target_year > panel.last_year() + 1 {
        return Err(Error::InvalidParameter(format!(
            "target year {target_year} is more than one year past the panel"
        )));
    }
    if spec.aif && aif.is_none() {
        return Err(Error::InvalidParameter("AIF features need an author context".into()));
    }
    let conf_idx: Vec<usize> = conferences
        .iter()
        .map(|c| panel.conference_index(c).ok_or_else(|| Error::UnknownConference(c.clone())))
        .collect::<Result<_>>()?;

    let available = (target_year - panel.first_year()) as usize;
    let depth = spec.max_window();
    let coverage = (depth > available).then_some(available as f64);
    let mut columns = spec.column_names();
    if coverage.is_some() {
        columns.push(COVERAGE_COLUMN.into());
    }
    let target_idx = panel.year_index(target_year);

    let pairs: Vec<(usize, usize)> = conf_idx
        .iter()
        .flat_map(|&c| (0..panel.affiliations().len()).map(move |a| (c, a)))
        .collect();
    let rows: Vec<(Vec<f64>, RowFlags)> = pairs
        .par_iter()
        .map(|&(c, a)| {
            let series = panel.series(c, a);
            let history = &series[..available.min(series.len())];
            let aif_stats = aif.map(|ctx| {
                ctx.stats(
                    &panel.conferences()[c],
                    &panel.affiliations()[a],
                    panel.first_year(),
                    target_year,
                )
            });
            row_features(history, spec, aif_stats, coverage)
        })
        .collect::<Result<_>>()?;

    let mut counters = ImputationCounters::default();
    let mut values = Vec::with_capacity(rows.len() * columns.len());
    for (row, flags) in rows {
        counters.zero_extended_rows += usize::from(coverage.is_some());
        counters.ses_fit_fallback_rows += usize::from(flags.ses_fallback);
        counters.aif_absent_rows += usize::from(flags.aif_absent);
        values.extend(row);
    }
    let keys = pairs
        .iter()
        .map(|&(c, a)| RowKey {
            conference: panel.conferences()[c].clone(),
            affiliation: panel.affiliations()[a].clone(),
            year: target_year,
        })
        .collect();
    let targets = target_idx.map(|y| pairs.iter().map(|&(c, a)| panel.series(c, a)[y]).collect());
    Ok((FeatureMatrix::new(columns, keys, values, targets)?, counters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relevance::{PaperFilter, RelevanceCell};

    fn panel(values: &[(i32, f64)]) -> RelevancePanel {
        let years = values.iter().map(|v| v.0);
        let lo = years.clone().min().unwrap();
        let hi = years.max().unwrap();
        RelevancePanel::from_cells(
            ["c".into()],
            ["A".into()],
            lo..=hi,
            PaperFilter::AllPapers,
            values.iter().map(|&(year, relevance)| RelevanceCell {
                conference: "c".into(),
                affiliation: "A".into(),
                year,
                relevance,
                paper_count: relevance.ceil() as u32,
            }),
        )
        .unwrap()
    }

    #[test]
    fn lag_lookups() {
        let p = panel(&[(2012, 1.0), (2013, 0.0), (2014, 0.75)]);
        let l = |t, w| lagged_relevance(&p, &"c".into(), &"A".into(), t, w, false);
        assert_eq!(l(2015, 1).unwrap(), [0.75]);
        assert_eq!(l(2015, 2).unwrap()[1], 0.0);
        assert_eq!(l(2015, 3).unwrap(), [0.75, 0.0, 1.0]);
        assert!(matches!(l(2014, 3), Err(Error::LagOutOfRange { lag: 3, .. })));
        let z = lagged_relevance(&p, &"c".into(), &"A".into(), 2014, 3, true).unwrap();
        assert_eq!(z, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn toy_lags_three_two_one() {
        let p = panel(&[(2012, 1.0), (2013, 2.0), (2014, 3.0)]);
        assert_eq!(lagged_relevance(&p, &"c".into(), &"A".into(), 2015, 3, false).unwrap(), [3.0, 2.0, 1.0]);
    }

    #[test]
    fn drift_only_spec() {
        let p = panel(&[(2012, 1.0), (2013, 2.0), (2014, 3.0)]);
        let spec = FeatureSetSpec { drift: true, ..Default::default() };
        let m = assemble(&p, &spec, &["c".into()], 2015, None).unwrap();
        assert_eq!(m.columns(), ["drift"]);
        assert_eq!(m.row(0), [4.0]);
        assert!(m.targets().is_none(), "2015 lies past the panel");
    }

    #[test]
    fn empty_spec_is_keys_and_target() {
        let p = panel(&[(2012, 1.0), (2013, 2.0), (2014, 3.0)]);
        let m = assemble(&p, &FeatureSetSpec::default(), &["c".into()], 2014, None).unwrap();
        assert_eq!(m.n_cols(), 0);
        assert_eq!(m.targets().unwrap(), [3.0]);
        assert_eq!(m.keys()[0].year, 2014);
    }

    #[test]
    fn short_history_adds_coverage() {
        let p = panel(&[(2012, 1.0), (2013, 2.0), (2014, 3.0)]);
        let spec = FeatureSetSpec { lag_windows: vec![4], ses_fitted: true, ..Default::default() };
        let (m, counters) = assemble_detailed(&p, &spec, &["c".into()], 2014, None).unwrap();
        assert_eq!(m.columns(), ["lag_1", "lag_2", "lag_3", "lag_4", "ses_fit", COVERAGE_COLUMN]);
        assert_eq!(&m.row(0)[..4], [2.0, 1.0, 0.0, 0.0]);
        assert_eq!(m.row(0)[5], 2.0);
        assert_eq!(counters.zero_extended_rows, 1);
        assert_eq!(counters.ses_fit_fallback_rows, 1);
    }

    #[test]
    fn target_year_guards() {
        let p = panel(&[(2012, 1.0), (2013, 2.0)]);
        let spec = FeatureSetSpec { drift: true, ..Default::default() };
        assert!(assemble(&p, &spec, &["c".into()], 2012, None).is_err());
        assert!(assemble(&p, &spec, &["c".into()], 2015, None).is_err());
        assert!(matches!(
            assemble(&p, &spec, &["zz".into()], 2013, None),
            Err(Error::UnknownConference(_))
        ));
        let aif = FeatureSetSpec { aif: true, ..Default::default() };
        assert!(assemble(&p, &aif, &["c".into()], 2013, None).is_err());
    }
}
