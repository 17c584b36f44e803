//! Backtests every combination of feature families and related-conference
//! counts over several validation years, then picks the configuration that
//! never loses to the baseline.
//!
//! cargo run --release --example backtest_grid -- [grid.json] [report.json]
//!
//! Without a grid file, runs all 31 family combinations with 0 and 3
//! related conferences on a generated panel.

use std::path::Path;

use affrank::bench::{
    feature_families, feature_set_combinations, grid_search, select_config, synthetic_panel, write_report, CompetitionSetup,
    GridConfig, ModelFamily, Selection,
};
use affrank::models::GbdtConfig;

fn main() -> affrank::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let setup = CompetitionSetup {
        related_counts: vec![0, 3],
        ..Default::default()
    };
    let (panel, related) = synthetic_panel(&setup)?;
    let grid: GridConfig = match args.get(1) {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| affrank::Error::InvalidParameter(format!("{path}: {e}")))?;
            serde_json::from_str(&text)?
        }
        None => GridConfig {
            conference: panel.conferences()[0].clone(),
            related: related.iter().map(|n| n.conference.clone()).collect(),
            feature_sets: feature_set_combinations(&feature_families()),
            related_counts: vec![0, 3],
            validation_years: setup.validation_years.clone(),
            family: ModelFamily::Gbdt(GbdtConfig { n_trees: 100, ..Default::default() }),
            train_window: None,
            k: 20,
        },
    };
    println!("{} cells on {} threads", grid.n_cells(), rayon::current_num_threads());
    let report = grid_search(&panel, &grid, None)?;
    for b in &report.baseline {
        println!("baseline {}: {:?}", b.year, b.outcome.ndcg());
    }
    let mut means: Vec<(String, usize, f64, bool)> = report
        .configs()
        .into_iter()
        .map(|(f, r)| {
            let v: Vec<f64> = report.config_cells(f, r).filter_map(|c| c.outcome.ndcg()).collect();
            (f.to_string(), r, v.iter().sum::<f64>() / v.len().max(1) as f64, report.dominates_baseline(f, r))
        })
        .collect();
    means.sort_by(|a, b| b.2.total_cmp(&a.2));
    for (f, r, m, dom) in means.iter().take(10) {
        println!("{f:<28} related={r} mean={m:.4}{}", if *dom { "  dominates" } else { "" });
    }
    match select_config(&report)? {
        Selection::Config { feature_set, related_count, mean_ndcg, .. } => {
            println!("selected {feature_set} with {related_count} related (mean {mean_ndcg:.4})")
        }
        Selection::BaselineFallback { mean_ndcg, .. } => println!("falling back to the baseline (mean {mean_ndcg:.4})"),
    }
    if let Some(path) = args.get(2) {
        write_report(Path::new(path), &report)?;
        println!("report written to {path}");
    }
    Ok(())
}
