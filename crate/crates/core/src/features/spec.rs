use serde::{Deserialize, Serialize};

use super::stats::SeriesStats;
use crate::error::{Error, Result};

/// Deepest window accepted by [`FeatureSetSpec::validate`].
pub const MAX_WINDOW: usize = 4;

/// Fixed smoothing parameters of the `ses_*` features.
pub const DEFAULT_SES_ALPHAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Which feature families to compute, and over which windows.
///
/// Windows count years back from the year before the target.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSetSpec {
    /// Raw relevance lags; the deepest window decides how many lag columns.
    pub lag_windows: Vec<usize>,
    /// Summary statistics over the last `y` years, per window.
    pub stat_windows: Vec<usize>,
    /// Summary statistics over the full history.
    pub all_history_stats: bool,
    /// Linearly weighted moving averages, per window.
    pub wma_windows: Vec<usize>,
    pub drift: bool,
    /// Simple exponential smoothing forecasts at fixed α.
    pub ses_alphas: Vec<f64>,
    /// Exponential smoothing with α fitted per series.
    pub ses_fitted: bool,
    /// Author impact factor statistics.
    pub aif: bool,
}

impl FeatureSetSpec {
    /// Full-history stats, lags and weighted averages over 2-4 years, AIF.
    pub fn relevance_trends() -> Self {
        Self {
            lag_windows: vec![4],
            all_history_stats: true,
            wma_windows: vec![2, 3, 4],
            aif: true,
            ..Self::default()
        }
    }

    /// Windowed stats, lags, drift and exponential smoothing (no AIF).
    pub fn time_series() -> Self {
        Self {
            lag_windows: vec![4],
            stat_windows: vec![1, 2, 3, 4],
            all_history_stats: true,
            drift: true,
            ses_alphas: DEFAULT_SES_ALPHAS.to_vec(),
            ses_fitted: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let windows = self
            .lag_windows
            .iter()
            .chain(&self.stat_windows)
            .chain(&self.wma_windows);
        for &w in windows {
            if !(1..=MAX_WINDOW).contains(&w) {
                return Err(Error::InvalidParameter(format!(
                    "window {w} outside 1..={MAX_WINDOW}"
                )));
            }
        }
        for &a in &self.ses_alphas {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::InvalidParameter(format!("smoothing parameter {a} outside (0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.column_names().is_empty()
    }

    /// Deepest window any family looks back; zero when none is windowed.
    pub fn max_window(&self) -> usize {
        self.lag_windows
            .iter()
            .chain(&self.stat_windows)
            .chain(&self.wma_windows)
            .copied()
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn lag_depth(&self) -> usize {
        self.lag_windows.iter().copied().max().unwrap_or(0)
    }

    pub(crate) fn sorted_stat_windows(&self) -> Vec<usize> {
        sorted_unique(&self.stat_windows)
    }

    pub(crate) fn sorted_wma_windows(&self) -> Vec<usize> {
        sorted_unique(&self.wma_windows)
    }

    pub(crate) fn sorted_alphas(&self) -> Vec<f64> {
        let mut a = self.ses_alphas.clone();
        a.sort_by(f64::total_cmp);
        a.dedup();
        a
    }

    /// Feature column names in matrix order (without the coverage column).
    pub fn column_names(&self) -> Vec<String> {
        let mut cols = Vec::new();
        for k in 1..=self.lag_depth() {
            cols.push(format!("lag_{k}"));
        }
        for w in self.sorted_stat_windows() {
            for s in SeriesStats::NAMES {
                cols.push(format!("sw{w}_{s}"));
            }
        }
        if self.all_history_stats {
            for s in SeriesStats::NAMES {
                cols.push(format!("s_all_{s}"));
            }
        }
        for w in self.sorted_wma_windows() {
            cols.push(format!("wma_{w}"));
        }
        if self.drift {
            cols.push("drift".into());
        }
        for a in self.sorted_alphas() {
            cols.push(format!("ses_{a:.2}"));
        }
        if self.ses_fitted {
            cols.push("ses_fit".into());
        }
        if self.aif {
            for s in SeriesStats::NAMES {
                cols.push(format!("aif_{s}"));
            }
            cols.push("aif_present".into());
        }
        cols
    }

    pub fn feature_count(&self) -> usize {
        self.column_names().len()
    }
}

fn sorted_unique(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        FeatureSetSpec::relevance_trends().validate().unwrap();
        FeatureSetSpec::time_series().validate().unwrap();
        assert_eq!(FeatureSetSpec::time_series().feature_count(), 4 + 24 + 6 + 1 + 5 + 1);
    }

    #[test]
    fn rejects_bad_windows_and_alphas() {
        let s = FeatureSetSpec { stat_windows: vec![5], ..Default::default() };
        assert!(s.validate().is_err());
        let s = FeatureSetSpec { lag_windows: vec![0], ..Default::default() };
        assert!(s.validate().is_err());
        let s = FeatureSetSpec { ses_alphas: vec![0.0], ..Default::default() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn column_names_are_unique_and_ordered() {
        let s = FeatureSetSpec {
            lag_windows: vec![2, 1],
            wma_windows: vec![3, 2, 3],
            drift: true,
            ses_alphas: vec![0.5, 0.1],
            ..Default::default()
        };
        assert_eq!(
            s.column_names(),
            ["lag_1", "lag_2", "wma_2", "wma_3", "drift", "ses_0.10", "ses_0.50"]
        );
        assert!(FeatureSetSpec::default().is_empty());
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let s = FeatureSetSpec::time_series();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<FeatureSetSpec>(&text).unwrap(), s);
        assert!(serde_json::from_str::<FeatureSetSpec>(r#"{"bogus": 1}"#).is_err());
        let partial: FeatureSetSpec = serde_json::from_str(r#"{"drift": true}"#).unwrap();
        assert_eq!(partial.column_names(), ["drift"]);
    }
}
