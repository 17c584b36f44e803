//! Turns a relevance panel into a feature matrix: lags, windowed statistics,
//! weighted averages, drift, exponential smoothing and author impact.
//!
//! cargo run --release --example feature_engineering -- [target-year] [out.tsv]

use affrank::features::{
    assemble_detailed, drift_forecast, ses_fit_alpha, ses_forecast, weighted_moving_average, write_matrix, AifContext,
    FeatureSetSpec, MatrixSidecar, DEFAULT_AIF_WINDOW,
};
use affrank::ingest::{sample_corpus, SampleParams};
use affrank::relevance::{build_panel, PaperFilter, PanelOptions};
use affrank::synth::{generate, SynthConfig};

fn main() -> affrank::Result<()> {
    // The forecasters on a toy history, oldest first.
    let history = [1.0, 2.0, 3.0, 2.5];
    println!("history {history:?}");
    println!("  drift      {:.4}", drift_forecast(&history));
    println!("  ses(0.5)   {:.4}", ses_forecast(&history, 0.5)?);
    let fit = ses_fit_alpha(&history)?;
    println!("  ses fitted {:.4} (alpha {:.2})", fit.forecast, fit.alpha);
    println!("  wma(3)     {:.4}", weighted_moving_average(&[2.5, 3.0, 2.0], 3)?);

    let corpus = generate(&SynthConfig::default())?;
    let mut params = SampleParams::new(corpus.conferences.iter().cloned());
    params.seed_years = (*corpus.years.start(), *corpus.years.end());
    params.author_floor_year = *corpus.years.start();
    params.bfs_depth = 0;
    let snapshot = sample_corpus(&corpus.raw, &params)?;
    let panel = build_panel(&snapshot, &corpus.conferences, corpus.years.clone(), PaperFilter::AllPapers, &PanelOptions::default())?;
    let aif = AifContext::from_snapshot(&snapshot, DEFAULT_AIF_WINDOW);

    let args: Vec<String> = std::env::args().collect();
    let target_year = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(panel.last_year());
    let conferences = &corpus.conferences[..2];
    for (name, spec) in [("relevance trends", FeatureSetSpec::relevance_trends()), ("time series", FeatureSetSpec::time_series())] {
        let (m, imputed) = assemble_detailed(&panel, &spec, conferences, target_year, Some(&aif))?;
        println!("\n{name}: {} rows x {} columns for {target_year}", m.n_rows(), m.n_cols());
        println!("  columns: {}", m.columns().join(" "));
        println!("  imputation: {imputed:?}");
        let row = 0;
        let key = &m.keys()[row];
        println!("  {} {}: target {:?}", key.conference, key.affiliation, m.targets().map(|t| t[row]));
        for (c, v) in m.columns().iter().zip(m.row(row)).take(8) {
            println!("    {c:<12} {v:.4}");
        }
        if let Some(path) = args.get(2) {
            let path = std::path::Path::new(path).with_extension(if name.starts_with('r') { "trends.tsv" } else { "ts.tsv" });
            let sidecar = MatrixSidecar {
                spec: spec.clone(),
                target_year,
                conferences: conferences.to_vec(),
                columns: m.columns().to_vec(),
                imputation: imputed,
            };
            write_matrix(&path, &m, Some(&sidecar))?;
            println!("  written to {}", path.display());
        }
    }
    Ok(())
}
