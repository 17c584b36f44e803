//! On-disk snapshot format: one TSV per record kind plus `manifest.json`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::parse::{parse_table, IngestSchema, ParseOptions, SkipCounters};
use super::{AuthorshipLink, CitationEdge, CorpusSnapshot, KeywordRecord, PaperRecord, SampleParams};
use crate::error::Result;
use crate::tsv;

pub const PAPERS_FILE: &str = "papers.tsv";
pub const AUTHORSHIPS_FILE: &str = "authorships.tsv";
pub const CITATIONS_FILE: &str = "citations.tsv";
pub const KEYWORDS_FILE: &str = "keywords.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SnapshotManifest {
    pub papers: usize,
    pub authorships: usize,
    pub citations: usize,
    pub dangling_citations: usize,
    pub keywords: usize,
    #[serde(default)]
    pub params: Option<SampleParams>,
    #[serde(default)]
    pub skipped: SkipCounters,
}

impl SnapshotManifest {
    pub fn describe(snapshot: &CorpusSnapshot) -> Self {
        Self {
            papers: snapshot.papers().len(),
            authorships: snapshot.authorships().len(),
            citations: snapshot.citations().len(),
            dangling_citations: snapshot.dangling_citations().len(),
            keywords: snapshot.keywords().len(),
            params: None,
            skipped: SkipCounters::default(),
        }
    }
}

/// Writes `snapshot` into `dir`. Counts in `manifest` are refreshed from the
/// snapshot; its parameters and skip counters are recorded as given.
pub fn write_snapshot(dir: &Path, snapshot: &CorpusSnapshot, manifest: &SnapshotManifest) -> Result<()> {
    let path = dir.join(PAPERS_FILE);
    let mut w = tsv::create(&path)?;
    for p in snapshot.papers() {
        let year = p.year.to_string();
        let conf = p.conference.as_ref().map_or("", |c| c.as_str());
        let flag = if p.is_full_research { "1" } else { "0" };
        tsv::write_line(&mut w, &path, &[p.paper_id.as_str(), &year, conf, flag])?;
    }
    tsv::finish(w, &path)?;

    let path = dir.join(AUTHORSHIPS_FILE);
    let mut w = tsv::create(&path)?;
    for l in snapshot.authorships() {
        let aff = l.affiliation_id.as_ref().map_or("", |a| a.as_str());
        let seq = l.author_sequence.to_string();
        tsv::write_line(&mut w, &path, &[l.paper_id.as_str(), l.author_id.as_str(), aff, &seq])?;
    }
    tsv::finish(w, &path)?;

    let path = dir.join(CITATIONS_FILE);
    let mut w = tsv::create(&path)?;
    for e in snapshot.citations().iter().chain(snapshot.dangling_citations()) {
        tsv::write_line(&mut w, &path, &[e.citing.as_str(), e.cited.as_str()])?;
    }
    tsv::finish(w, &path)?;

    let path = dir.join(KEYWORDS_FILE);
    let mut w = tsv::create(&path)?;
    for k in snapshot.keywords() {
        tsv::write_line(&mut w, &path, &[k.paper_id.as_str(), &k.keyword])?;
    }
    tsv::finish(w, &path)?;

    let manifest = SnapshotManifest {
        params: manifest.params.clone(),
        skipped: manifest.skipped.clone(),
        ..SnapshotManifest::describe(snapshot)
    };
    tsv::write_json(&dir.join(MANIFEST_FILE), &manifest)
}

pub fn read_snapshot(dir: &Path) -> Result<(CorpusSnapshot, SnapshotManifest)> {
    let schema = IngestSchema::interchange();
    let opts = ParseOptions {
        strict: true,
        min_year: i32::MIN,
        max_year: i32::MAX,
        ..ParseOptions::default()
    };
    let papers = parse_table::<PaperRecord>(&dir.join(PAPERS_FILE), &schema.papers, &opts)?;
    let links = parse_table::<AuthorshipLink>(&dir.join(AUTHORSHIPS_FILE), &schema.authorships, &opts)?;
    let cites = parse_table::<CitationEdge>(&dir.join(CITATIONS_FILE), &schema.citations, &opts)?;
    let kws = parse_table::<KeywordRecord>(&dir.join(KEYWORDS_FILE), &schema.keywords, &opts)?;
    let manifest: SnapshotManifest = tsv::read_json(&dir.join(MANIFEST_FILE))?;
    let snapshot = CorpusSnapshot::from_records(papers.records, links.records, cites.records, kws.records);
    Ok((snapshot, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_optional_fields() {
        let snap = CorpusSnapshot::from_records(
            vec![
                PaperRecord { paper_id: "a".into(), year: 2010, conference: Some("K".into()), is_full_research: true },
                PaperRecord { paper_id: "b".into(), year: 2011, conference: None, is_full_research: false },
            ],
            vec![AuthorshipLink { paper_id: "a".into(), author_id: "x".into(), affiliation_id: None, author_sequence: 2 }],
            vec![
                CitationEdge { citing: "b".into(), cited: "a".into() },
                CitationEdge { citing: "b".into(), cited: "gone".into() },
            ],
            vec![KeywordRecord::new("a", "Graph  Mining")],
        );
        let dir = tempfile::tempdir().unwrap();
        write_snapshot(dir.path(), &snap, &SnapshotManifest::default()).unwrap();
        let (back, manifest) = read_snapshot(dir.path()).unwrap();
        assert_eq!(back, snap);
        assert_eq!(manifest.dangling_citations, 1);
        assert_eq!(manifest.papers, 2);
    }
}
