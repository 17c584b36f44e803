//! End-to-end run on a generated corpus: tune feature sets and related
//! conference counts by backtesting, then score the winner on the final
//! held-out year against the paper-count baseline.
//!
//! cargo run --release --example synthetic_competition -- [seed] [setup.json]
//!
//! The optional JSON file overrides any field of the default setup.

use std::time::Instant;

use affrank::bench::{run_competition, CompetitionSetup, Selection};

fn main() -> affrank::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut setup: CompetitionSetup = match args.get(2) {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| affrank::Error::InvalidParameter(format!("{path}: {e}")))?;
            serde_json::from_str(&text)?
        }
        None => CompetitionSetup::default(),
    };
    setup.synth.seed = seed;
    let started = Instant::now();
    let result = run_competition(&setup)?;

    println!("main conference {}", result.conference);
    let related: Vec<String> = result
        .related
        .iter()
        .map(|n| format!("{} ({:.3})", n.conference, n.score))
        .collect();
    println!("related by authors: {}", related.join(", "));
    for b in &result.report.baseline {
        println!("baseline {}: {:?}", b.year, b.outcome.ndcg());
    }
    for c in &result.report.cells {
        println!(
            "{:<18} related={:<2} {} ndcg={:?}",
            c.feature_set,
            c.related_count,
            c.year,
            c.outcome.ndcg()
        );
    }
    match &result.selection {
        Selection::Config {
            feature_set,
            related_count,
            mean_ndcg,
            ..
        } => println!("selected {feature_set} with {related_count} related (mean {mean_ndcg:.4})"),
        Selection::BaselineFallback { .. } => println!("no configuration beat the baseline; using it"),
    }
    println!(
        "held-out {}: model {:?}, baseline {:?}",
        result.held_out_year,
        result.held_out_ndcg(),
        result.held_out_baseline.ndcg()
    );
    println!("elapsed {:.1?}", started.elapsed());
    Ok(())
}
