//! File-based run through every stage, starting from MAG-layout dump files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use affrank::bench::{ndcg_at_k, read_ranking, read_truth, write_ranking, write_truth, RankedList};
use affrank::features::{assemble, read_matrix, write_matrix, FeatureMatrix, FeatureSetSpec};
use affrank::ingest::{read_snapshot, sample_corpus, write_snapshot, GraphFiles, IngestSchema, RawGraph, SampleParams, SnapshotManifest};
use affrank::models::{gbdt_fit, load_model, save_model, GbdtConfig, Model};
use affrank::relevance::{build_panel, read_panel, write_panel, PaperFilter, PanelOptions};
use affrank::synth::{generate, SynthConfig};
use affrank::ConferenceId;

fn write_mag(dir: &Path, raw: &RawGraph) -> GraphFiles {
    let mut papers = String::new();
    let mut flags = String::new();
    for p in &raw.papers {
        let conf = p.conference.as_ref().map(|c| c.to_string()).unwrap_or_default();
        writeln!(papers, "{}\tTitle\ttitle\t{}\t{}/01/01\t\tVenue\tvenue\t\t{}\t\t1", p.paper_id, p.year, p.year, conf).unwrap();
        if p.is_full_research {
            writeln!(flags, "{}", p.paper_id).unwrap();
        }
    }
    let mut links = String::new();
    for l in &raw.authorships {
        let aff = l.affiliation_id.as_ref().map(|a| a.to_string()).unwrap_or_default();
        writeln!(links, "{}\t{}\t{}\tOrig\tnorm\t{}", l.paper_id, l.author_id, aff, l.author_sequence).unwrap();
    }
    let mut refs = String::new();
    for c in &raw.citations {
        writeln!(refs, "{}\t{}", c.citing, c.cited).unwrap();
    }
    let mut kws = String::new();
    for k in &raw.keywords {
        writeln!(kws, "{}\t{}\t0", k.paper_id, k.keyword).unwrap();
    }
    let files = GraphFiles {
        papers: dir.join("Papers.txt"),
        authorships: dir.join("PaperAuthorAffiliations.txt"),
        citations: dir.join("PaperReferences.txt"),
        keywords: dir.join("PaperKeywords.txt"),
        full_research_flags: Some(dir.join("full_research.txt")),
    };
    std::fs::write(&files.papers, papers).unwrap();
    std::fs::write(&files.authorships, links).unwrap();
    std::fs::write(&files.citations, refs).unwrap();
    std::fs::write(&files.keywords, kws).unwrap();
    std::fs::write(files.full_research_flags.as_ref().unwrap(), flags).unwrap();
    files
}

#[test]
fn dump_to_ndcg() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate(&SynthConfig {
        n_conferences: 4,
        n_affiliations: 50,
        n_years: 9,
        papers_per_year: 120,
        ..Default::default()
    })
    .unwrap();
    let files = write_mag(dir.path(), &corpus.raw);
    let (raw, skipped) = RawGraph::load(&files, &IngestSchema::default()).unwrap();
    assert_eq!(skipped, Default::default());
    assert_eq!(raw, corpus.raw);

    let target: ConferenceId = corpus.conferences[0].clone();
    let years = corpus.years.clone();
    let mut params = SampleParams::new(corpus.conferences.iter().cloned());
    params.seed_years = (*years.start(), *years.end());
    params.author_floor_year = *years.start();
    let snap = sample_corpus(&raw, &params).unwrap();
    let snap_dir = dir.path().join("snapshot");
    write_snapshot(&snap_dir, &snap, &SnapshotManifest::describe(&snap)).unwrap();
    let (snap, _) = read_snapshot(&snap_dir).unwrap();

    let panel = build_panel(&snap, &corpus.conferences, years.clone(), PaperFilter::FullResearchOnly, &PanelOptions::default()).unwrap();
    let panel_dir = dir.path().join("panel");
    write_panel(&panel_dir, &panel).unwrap();
    let panel = read_panel(&panel_dir).unwrap();

    let spec = FeatureSetSpec { lag_windows: vec![3], drift: true, ses_alphas: vec![0.5], ..Default::default() };
    let last = *years.end();
    let parts: Vec<FeatureMatrix> = (years.start() + 3..last)
        .map(|t| assemble(&panel, &spec, &corpus.conferences, t, None).unwrap())
        .collect();
    let train_path = dir.path().join("train.tsv");
    write_matrix(&train_path, &FeatureMatrix::vstack(&parts).unwrap(), None).unwrap();
    let train = read_matrix(&train_path).unwrap();
    let test = assemble(&panel, &spec, std::slice::from_ref(&target), last, None).unwrap();

    let model = gbdt_fit(&train, &GbdtConfig { n_trees: 80, ..Default::default() }).unwrap();
    let model_path = dir.path().join("model.json");
    save_model(&model_path, &Model::Gbdt(model.clone())).unwrap();
    let Model::Gbdt(loaded) = load_model(&model_path).unwrap() else { panic!("wrong family") };
    let scores = loaded.predict(&test).unwrap();
    assert_eq!(scores, model.predict(&test).unwrap());

    let recent = panel.year_slice(0, last - 1).unwrap();
    let entries = test.keys().iter().map(|k| k.affiliation.clone()).zip(scores).collect();
    let ranking = RankedList::rank(target.clone(), last, entries, &recent).unwrap();
    let ranking_path = dir.path().join("ranking.tsv");
    write_ranking(&ranking_path, &ranking).unwrap();
    let truth_path = dir.path().join("truth.tsv");
    let truth: BTreeMap<_, _> = panel.year_slice(0, last).unwrap();
    write_truth(&truth_path, &truth).unwrap();

    let report = ndcg_at_k(
        &read_ranking(&ranking_path, target, last).unwrap(),
        &read_truth(&truth_path).unwrap(),
        20,
    )
    .unwrap();
    assert!(report.ndcg > 0.5 && report.ndcg <= 1.0, "{report:?}");
}

#[test]
fn malformed_lines_are_counted_and_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let raw = RawGraph::default();
    let files = write_mag(dir.path(), &raw);
    std::fs::write(
        &files.papers,
        "p1\tT\tt\t2012\t\t\t\t\t\tKDD\t\t1\n\
         p2\tT\tt\tnot-a-year\t\t\t\t\t\tKDD\t\t1\n\
         p3\tshort\n\
         p4\tT\tt\t2013\t\t\t\t\t\t\t\t1\n",
    )
    .unwrap();
    std::fs::write(&files.authorships, "p1\ta1\tu1\t\t\t1\np1\ta2\t\t\t\t2\np1\ta3\tu2\t\t\tx\n").unwrap();
    std::fs::write(files.full_research_flags.as_ref().unwrap(), "p1\n").unwrap();
    let (g, skipped) = RawGraph::load(&files, &IngestSchema::default()).unwrap();
    assert_eq!(skipped.papers, 2);
    assert_eq!(skipped.authorships, 1);
    assert_eq!(g.papers.len(), 2);
    assert!(g.papers[0].is_full_research && !g.papers[1].is_full_research);
    assert_eq!(g.papers[1].conference, None);
    assert_eq!(g.authorships[1].affiliation_id, None);
}
