//! Load a MAG-layout dump, sample the working corpus around the target
//! conferences and write it in the interchange format.
//!
//! cargo run --release --example ingest_and_sample -- <dump-dir> <out-dir> <conf>...
//!
//! `<dump-dir>` holds Papers.txt, PaperAuthorAffiliations.txt,
//! PaperReferences.txt, PaperKeywords.txt and optionally full_research.txt.
//! With no arguments a generated corpus stands in for the dump.

use std::path::{Path, PathBuf};

use affrank::ingest::{sample_corpus, write_snapshot, GraphFiles, IngestSchema, RawGraph, SampleParams, SnapshotManifest};
use affrank::synth::{generate, SynthConfig};
use affrank::ConferenceId;

fn files(dir: &Path) -> GraphFiles {
    let flags = dir.join("full_research.txt");
    GraphFiles {
        papers: dir.join("Papers.txt"),
        authorships: dir.join("PaperAuthorAffiliations.txt"),
        citations: dir.join("PaperReferences.txt"),
        keywords: dir.join("PaperKeywords.txt"),
        full_research_flags: flags.exists().then_some(flags),
    }
}

fn main() -> affrank::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (raw, targets, out, params_years) = if args.len() >= 3 {
        let (raw, skipped) = RawGraph::load(&files(Path::new(&args[0])), &IngestSchema::default())?;
        println!("skipped lines: {skipped:?}");
        let targets: Vec<ConferenceId> = args[2..].iter().map(|c| ConferenceId::new(c.as_str())).collect();
        (raw, targets, PathBuf::from(&args[1]), None)
    } else {
        let corpus = generate(&SynthConfig::default())?;
        let years = (*corpus.years.start(), *corpus.years.end());
        let out = std::env::temp_dir().join("affrank-snapshot");
        (corpus.raw, corpus.conferences[..2].to_vec(), out, Some(years))
    };
    println!(
        "dump: {} papers, {} authorships, {} references, {} keywords",
        raw.papers.len(),
        raw.authorships.len(),
        raw.citations.len(),
        raw.keywords.len()
    );

    let mut params = SampleParams::new(targets);
    if let Some((lo, hi)) = params_years {
        params.seed_years = (hi - 4, hi);
        params.author_floor_year = lo;
    }
    for depth in 0..=params.bfs_depth {
        let p = SampleParams { bfs_depth: depth, ..params.clone() };
        println!("bfs depth {depth}: {} papers", sample_corpus(&raw, &p)?.papers().len());
    }
    let snapshot = sample_corpus(&raw, &params)?;
    let mut manifest = SnapshotManifest::describe(&snapshot);
    manifest.params = Some(params);
    write_snapshot(&out, &snapshot, &manifest)?;
    println!(
        "snapshot: {} papers, {} in-corpus citations, {} dangling -> {}",
        manifest.papers,
        manifest.citations,
        manifest.dangling_citations,
        out.display()
    );
    let top = snapshot
        .degrees()
        .iter()
        .max_by_key(|(id, d)| (d.in_degree, std::cmp::Reverse(*id)));
    if let Some((id, d)) = top {
        println!("most cited in sample: {id} ({} citations)", d.in_degree);
    }
    Ok(())
}
