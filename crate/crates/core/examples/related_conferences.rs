//! Finds the conferences most similar to a target by shared authors,
//! shared keywords, or both rankings fused.
//!
//! cargo run --release --example related_conferences -- [target-index] [k]

use affrank::ingest::{sample_corpus, SampleParams};
use affrank::similarity::{build_profiles, related_conferences, write_related_report, RelatedOptions, SimilarityBasis};
use affrank::synth::{generate, SynthConfig};

fn main() -> affrank::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let target_idx: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let k: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);

    let corpus = generate(&SynthConfig { n_conferences: 10, ..Default::default() })?;
    let mut params = SampleParams::new(corpus.conferences.iter().cloned());
    params.seed_years = (*corpus.years.start(), *corpus.years.end());
    params.author_floor_year = *corpus.years.start();
    params.bfs_depth = 0;
    let snapshot = sample_corpus(&corpus.raw, &params)?;
    let profiles = build_profiles(&snapshot, corpus.years.clone());
    let target = &corpus.conferences[target_idx];
    println!("generated clusters: {:?}", corpus.conferences.iter().zip(&corpus.clusters).collect::<Vec<_>>());
    println!("target {target} (cluster {})", corpus.clusters[target_idx]);

    for basis in [SimilarityBasis::Authors, SimilarityBasis::Keywords, SimilarityBasis::RankFusion] {
        let neighbors = related_conferences(target, &profiles, k, basis, RelatedOptions::default())?;
        println!("\nby {basis}:");
        write_related_report(std::io::stdout().lock(), target, basis, &neighbors).expect("stdout");
    }
    Ok(())
}
