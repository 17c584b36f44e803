//! NDCG evaluation, year-based backtests and the tuning grid.

mod backtest;
mod competition;
mod grid;
mod ndcg;

pub use backtest::{baseline, baseline_model, score_ranking, Backtest, ModelFamily, Outcome, BASELINE_YEARS};
pub use grid::{
    feature_families, feature_set_combinations, grid_search, read_report, select_config, union_spec, write_report,
    BacktestReport, BaselineCell, GridCell, GridConfig, NamedFeatureSet, Selection,
};
pub use ndcg::{
    dcg, ndcg_at_k, read_ranking, read_truth, write_ranking, write_truth, NdcgReport, RankedList, DEFAULT_K,
};
pub use competition::{
    default_feature_sets, run_competition, synthetic_panel, CompetitionResult, CompetitionSetup,
};
