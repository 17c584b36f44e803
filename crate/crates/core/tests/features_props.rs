use affrank::features::{assemble, ses_fit_alpha, ses_forecast, FeatureSetSpec, COVERAGE_COLUMN, DEFAULT_SES_ALPHAS};
use affrank::relevance::{PaperFilter, RelevanceCell, RelevancePanel};
use affrank::ConferenceId;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIRST: i32 = 2005;

fn everything() -> FeatureSetSpec {
    FeatureSetSpec {
        lag_windows: vec![4],
        stat_windows: vec![1, 2, 3, 4],
        all_history_stats: true,
        wma_windows: vec![2, 3, 4],
        drift: true,
        ses_alphas: DEFAULT_SES_ALPHAS.to_vec(),
        ses_fitted: true,
        aif: false,
    }
}

/// One conference, one row of `series` per affiliation.
fn panel(series: &[Vec<f64>]) -> RelevancePanel {
    let n = series[0].len() as i32;
    let cells = series.iter().enumerate().flat_map(|(a, s)| {
        s.iter().enumerate().map(move |(y, &v)| RelevanceCell {
            conference: "C".into(),
            affiliation: format!("a{a:02}").into(),
            year: FIRST + y as i32,
            relevance: v,
            paper_count: v.ceil() as u32,
        })
    });
    let affs: Vec<_> = (0..series.len()).map(|a| format!("a{a:02}").into()).collect();
    RelevancePanel::from_cells(["C".into()], affs, FIRST..=FIRST + n - 1, PaperFilter::AllPapers, cells).unwrap()
}

/// How a column moves when every history value `v` becomes `v + c`, as a
/// multiple of `c`; `None` for columns exempt from the check.
fn shift_factor(column: &str, history_len: usize) -> Option<f64> {
    if column.ends_with("_std") {
        return Some(0.0);
    }
    if column.ends_with("_sum") {
        return Some(match column.strip_prefix("sw").and_then(|s| s.split('_').next()) {
            Some(w) => w.parse().unwrap(),
            None => history_len as f64,
        });
    }
    if column == "ses_fit" || column == COVERAGE_COLUMN {
        return None;
    }
    Some(1.0)
}

fn series_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (4usize..10).prop_flat_map(|len| prop::collection::vec(prop::collection::vec(0.0f64..50.0, len), 1..6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn constant_history_gives_constant_features(c in 0.0f64..100.0, len in 4usize..10) {
        let p = panel(&[vec![c; len]]);
        let m = assemble(&p, &everything(), &["C".into()], p.last_year() + 1, None).unwrap();
        for (j, col) in m.columns().iter().enumerate() {
            let want = shift_factor(col, len).unwrap_or(1.0) * c;
            let got = m.value(0, j);
            prop_assert!((got - want).abs() <= 1e-12 * c.max(1.0), "{} = {} want {}", col, got, want);
        }
    }

    #[test]
    fn features_shift_with_the_series(series in series_strategy(), c in 0.1f64..20.0) {
        let shifted: Vec<Vec<f64>> = series.iter().map(|s| s.iter().map(|v| v + c).collect()).collect();
        let len = series[0].len();
        let (p, q) = (panel(&series), panel(&shifted));
        let target = p.last_year() + 1;
        let a = assemble(&p, &everything(), &["C".into()], target, None).unwrap();
        let b = assemble(&q, &everything(), &["C".into()], target, None).unwrap();
        prop_assert_eq!(a.columns(), b.columns());
        for (j, col) in a.columns().iter().enumerate() {
            let Some(k) = shift_factor(col, len) else { continue };
            for r in 0..a.n_rows() {
                let want = a.value(r, j) + k * c;
                prop_assert!((b.value(r, j) - want).abs() <= 1e-9 * (1.0 + want.abs()), "{}", col);
            }
        }
    }

    #[test]
    fn assembly_ignores_cell_order(series in series_strategy(), seed in any::<u64>()) {
        let p = panel(&series);
        let mut cells: Vec<RelevanceCell> = p.cells().collect();
        cells.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let q = RelevancePanel::from_cells(
            p.conferences().to_vec(),
            p.affiliations().iter().rev().cloned(),
            p.years(),
            p.filter(),
            cells,
        ).unwrap();
        let confs: Vec<ConferenceId> = vec!["C".into()];
        let target = p.last_year();
        let a = assemble(&p, &everything(), &confs, target, None).unwrap();
        let b = assemble(&q, &everything(), &confs, target, None).unwrap();
        let bits = |m: &affrank::features::FeatureMatrix| {
            (0..m.n_rows()).flat_map(|r| m.row(r).iter().map(|v| v.to_bits()).collect::<Vec<_>>()).collect::<Vec<_>>()
        };
        prop_assert_eq!(a.keys(), b.keys());
        prop_assert_eq!(bits(&a), bits(&b));
        prop_assert_eq!(a.targets(), b.targets());
    }

    #[test]
    fn ses_matches_its_recursion(history in prop::collection::vec(-10.0f64..10.0, 1..15), step in 1u32..=100) {
        let alpha = f64::from(step) / 100.0;
        let mut s = history[0];
        for y in &history[1..] {
            s = alpha * y + (1.0 - alpha) * s;
        }
        prop_assert!((ses_forecast(&history, alpha).unwrap() - s).abs() <= 1e-12 * (1.0 + s.abs()));
    }
}

fn grid_sse(history: &[f64], alpha: f64) -> f64 {
    let mut level = history[0];
    let mut sse = 0.0;
    for y in &history[1..] {
        sse += (y - level).powi(2);
        level = alpha * y + (1.0 - alpha) * level;
    }
    sse
}

#[test]
fn fitted_alpha_on_alternating_series() {
    // Frozen from the brute-force grid search below.
    let h = [0.0, 1.0, 0.0, 1.0, 0.0];
    let best = (1..=100)
        .map(|i| f64::from(i) / 100.0)
        .min_by(|a, b| grid_sse(&h, *a).total_cmp(&grid_sse(&h, *b)))
        .unwrap();
    assert_eq!(best, 0.17);
    let fit = ses_fit_alpha(&h).unwrap();
    assert_eq!(fit.alpha, best);
    assert!((fit.sse - grid_sse(&h, best)).abs() < 1e-12);
    assert!((fit.forecast - ses_forecast(&h, best).unwrap()).abs() < 1e-15);
}
