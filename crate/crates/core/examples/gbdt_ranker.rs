//! Trains boosted regression trees on past years of a panel, ranks the
//! main conference's affiliations for the last year and compares the
//! ranking with the paper-count baseline.
//!
//! cargo run --release --example gbdt_ranker -- [n_trees] [max_depth]

use affrank::bench::{baseline, score_ranking, BASELINE_YEARS};
use affrank::features::{assemble, FeatureMatrix, FeatureSetSpec};
use affrank::bench::{synthetic_panel, CompetitionSetup};
use affrank::models::{gbdt_fit, GbdtConfig};

fn main() -> affrank::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let mut cfg = GbdtConfig::default();
    if let Some(n) = args.get(1).and_then(|s| s.parse().ok()) {
        cfg.n_trees = n;
    }
    if let Some(d) = args.get(2).and_then(|s| s.parse().ok()) {
        cfg.max_depth = d;
    }

    let (panel, related) = synthetic_panel(&CompetitionSetup::default())?;
    let main = panel.conferences()[0].clone();
    let mut pooled = vec![main.clone()];
    pooled.extend(related.iter().map(|n| n.conference.clone()));
    let spec = FeatureSetSpec {
        lag_windows: vec![4],
        stat_windows: vec![2, 3, 4],
        drift: true,
        ses_alphas: vec![0.3, 0.7],
        ..Default::default()
    };
    let year = panel.last_year();
    let parts = (panel.first_year() + 4..year)
        .map(|t| assemble(&panel, &spec, &pooled, t, None))
        .collect::<affrank::Result<Vec<_>>>()?;
    let train = FeatureMatrix::vstack(&parts)?;
    let model = gbdt_fit(&train, &cfg)?;
    println!("trained {} trees on {} rows x {} features", model.trees.len(), train.n_rows(), train.n_cols());
    let loss = &model.training_loss;
    println!("training MSE {:.4} -> {:.4}", loss[0], loss[loss.len() - 1]);

    let mut importance: Vec<_> = model.feature_importance().into_iter().collect();
    importance.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (name, share) in importance.iter().take(6) {
        println!("  {name:<10} {share:.3}");
    }

    let test = assemble(&panel, &spec, std::slice::from_ref(&main), year, None)?;
    let scores = test.keys().iter().map(|k| k.affiliation.clone()).zip(model.predict(&test)?).collect();
    let report = score_ranking(&panel, &main, year, scores, 20)?;
    let base = baseline(&panel, &main, year, 20)?;
    println!("\n{main} {year}: NDCG@20 gbdt {:.4}, {BASELINE_YEARS}-year paper counts {:.4}", report.ndcg, base.ndcg().unwrap_or(f64::NAN));
    Ok(())
}
