//! Relevance scores from author affiliations: one paper's shares, then the
//! full (conference, affiliation, year) panel.
//!
//! cargo run --release --example relevance_panel -- [snapshot-dir]

use std::path::Path;

use affrank::ingest::{read_snapshot, sample_corpus, CorpusSnapshot, SampleParams};
use affrank::relevance::{build_panel, paper_affiliation_shares, PaperFilter, PanelOptions};
use affrank::synth::{generate, SynthConfig};

fn main() -> affrank::Result<()> {
    let snapshot: CorpusSnapshot = match std::env::args().nth(1) {
        Some(dir) => read_snapshot(Path::new(&dir))?.0,
        None => {
            let corpus = generate(&SynthConfig::default())?;
            let mut params = SampleParams::new(corpus.conferences.iter().cloned());
            params.seed_years = (*corpus.years.start(), *corpus.years.end());
            params.author_floor_year = *corpus.years.start();
            params.bfs_depth = 0;
            sample_corpus(&corpus.raw, &params)?
        }
    };

    // Each author carries 1/authors of the paper, split over their affiliations.
    let paper = snapshot
        .papers()
        .iter()
        .find(|p| snapshot.links_of(&p.paper_id).len() >= 3)
        .expect("a paper with three authorships");
    let shares = paper_affiliation_shares(&paper.paper_id, snapshot.links_of(&paper.paper_id))?;
    println!("paper {} ({} links):", paper.paper_id, snapshot.links_of(&paper.paper_id).len());
    for (aff, s) in &shares.shares {
        println!("  {aff:<8} {s:.4}");
    }
    println!("  unaffiliated {:.4}", shares.deficit);

    let conferences: Vec<_> = snapshot.conferences().into_iter().collect();
    let years = snapshot.papers().iter().map(|p| p.year);
    let (lo, hi) = (years.clone().min().unwrap(), years.max().unwrap());
    for filter in [PaperFilter::AllPapers, PaperFilter::FullResearchOnly] {
        let panel = build_panel(&snapshot, &conferences, lo..=hi, filter, &PanelOptions::default())?;
        let slice = panel.year_slice(0, hi).expect("last year in panel");
        let mut top: Vec<_> = slice.into_iter().collect();
        top.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        println!(
            "\n{filter:?}: {} affiliations, {:.3} total in {} {hi}, deficit {:.3}",
            panel.affiliations().len(),
            panel.total(0, hi).unwrap(),
            conferences[0],
            panel.deficit(0, hi).unwrap()
        );
        for (aff, r) in top.iter().take(5) {
            println!("  {aff:<8} {r:.3}");
        }
    }
    Ok(())
}
