//! Parsing of MAG-style dumps and sampling of the working corpus.
//!
//! The corpus is built around a set of target conferences: their papers in a
//! seed year range, every later paper by the same authors, and the papers
//! reachable from those within a few citation hops. See [`sample_corpus`].

mod interchange;
mod parse;
mod sample;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ids::{AffiliationId, AuthorId, ConferenceId, PaperId};

pub use interchange::{read_snapshot, write_snapshot, SnapshotManifest};
pub use parse::{
    current_year, parse_reader, parse_table, read_flag_file, AuthorshipColumns, CitationColumns,
    GraphFiles, IngestSchema, KeywordColumns, PaperColumns, ParseOptions, Parsed, SkipCounters,
    TableRecord,
};
pub use sample::{compute_degrees, sample_corpus, BfsDirection, SampleParams};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: PaperId,
    pub year: i32,
    pub conference: Option<ConferenceId>,
    pub is_full_research: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AuthorshipLink {
    pub paper_id: PaperId,
    pub author_id: AuthorId,
    pub affiliation_id: Option<AffiliationId>,
    pub author_sequence: u32,
}

/// `citing` lists `cited` among its references.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CitationEdge {
    pub citing: PaperId,
    pub cited: PaperId,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KeywordRecord {
    pub paper_id: PaperId,
    pub keyword: String,
}

impl KeywordRecord {
    pub fn new(paper_id: impl Into<PaperId>, keyword: &str) -> Self {
        Self {
            paper_id: paper_id.into(),
            keyword: normalize_keyword(keyword),
        }
    }
}

/// Lowercases, trims and collapses internal whitespace runs to one space.
pub fn normalize_keyword(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degree {
    /// Papers citing this one.
    pub in_degree: usize,
    /// Entries of this paper's reference list.
    pub out_degree: usize,
}

/// Every record kind of the dump, unsampled.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawGraph {
    pub papers: Vec<PaperRecord>,
    pub authorships: Vec<AuthorshipLink>,
    pub citations: Vec<CitationEdge>,
    pub keywords: Vec<KeywordRecord>,
}

/// An immutable, normalized sample of the graph.
///
/// All collections are sorted and deduplicated. `citations` holds edges whose
/// endpoints are both in the snapshot; `dangling` holds edges from a sampled
/// paper to a paper missing from the source dump. Degrees ignore dangling
/// edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSnapshot {
    papers: Vec<PaperRecord>,
    authorships: Vec<AuthorshipLink>,
    citations: Vec<CitationEdge>,
    dangling: Vec<CitationEdge>,
    keywords: Vec<KeywordRecord>,
    degrees: BTreeMap<PaperId, Degree>,
}

impl CorpusSnapshot {
    /// Normalizes loose records into a snapshot.
    ///
    /// Papers with a repeated id keep their first occurrence. Authorships and
    /// keywords of unknown papers are dropped, citations whose cited paper is
    /// unknown become dangling, and citations from unknown papers are dropped.
    pub fn from_records(
        papers: Vec<PaperRecord>,
        authorships: Vec<AuthorshipLink>,
        citations: Vec<CitationEdge>,
        keywords: Vec<KeywordRecord>,
    ) -> Self {
        let mut seen = BTreeSet::new();
        let mut papers: Vec<PaperRecord> = papers
            .into_iter()
            .filter(|p| seen.insert(p.paper_id.clone()))
            .collect();
        papers.sort();
        let known = |id: &PaperId| seen.contains(id);

        let mut authorships: Vec<_> = authorships
            .into_iter()
            .filter(|l| known(&l.paper_id))
            .collect();
        authorships.sort();
        authorships.dedup_by(|a, b| {
            a.paper_id == b.paper_id
                && a.author_id == b.author_id
                && a.affiliation_id == b.affiliation_id
        });

        let mut internal = Vec::new();
        let mut dangling = Vec::new();
        for edge in citations {
            if edge.citing == edge.cited || !known(&edge.citing) {
                continue;
            }
            if known(&edge.cited) {
                internal.push(edge);
            } else {
                dangling.push(edge);
            }
        }
        internal.sort();
        internal.dedup();
        dangling.sort();
        dangling.dedup();

        let mut keywords: Vec<_> = keywords
            .into_iter()
            .filter(|k| known(&k.paper_id) && !k.keyword.is_empty())
            .collect();
        keywords.sort();
        keywords.dedup();

        let degrees = compute_degrees(papers.iter().map(|p| &p.paper_id), &internal);
        Self {
            papers,
            authorships,
            citations: internal,
            dangling,
            keywords,
            degrees,
        }
    }

    pub fn empty() -> Self {
        Self::from_records(Vec::new(), Vec::new(), Vec::new(), Vec::new())
    }

    /// Sorted by paper id.
    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn authorships(&self) -> &[AuthorshipLink] {
        &self.authorships
    }

    pub fn citations(&self) -> &[CitationEdge] {
        &self.citations
    }

    pub fn dangling_citations(&self) -> &[CitationEdge] {
        &self.dangling
    }

    pub fn keywords(&self) -> &[KeywordRecord] {
        &self.keywords
    }

    pub fn degrees(&self) -> &BTreeMap<PaperId, Degree> {
        &self.degrees
    }

    pub fn paper(&self, id: &PaperId) -> Option<&PaperRecord> {
        self.papers
            .binary_search_by(|p| p.paper_id.cmp(id))
            .ok()
            .map(|i| &self.papers[i])
    }

    pub fn contains(&self, id: &PaperId) -> bool {
        self.paper(id).is_some()
    }

    /// Authorship rows of one paper.
    pub fn links_of(&self, id: &PaperId) -> &[AuthorshipLink] {
        let lo = self.authorships.partition_point(|l| l.paper_id < *id);
        let hi = self.authorships.partition_point(|l| l.paper_id <= *id);
        &self.authorships[lo..hi]
    }

    pub fn keywords_of(&self, id: &PaperId) -> &[KeywordRecord] {
        let lo = self.keywords.partition_point(|k| k.paper_id < *id);
        let hi = self.keywords.partition_point(|k| k.paper_id <= *id);
        &self.keywords[lo..hi]
    }

    /// Distinct conference series present in the snapshot.
    pub fn conferences(&self) -> BTreeSet<ConferenceId> {
        self.papers
            .iter()
            .filter_map(|p| p.conference.clone())
            .collect()
    }

    /// The snapshot's records as an unsampled graph, dangling edges included.
    pub fn to_raw(&self) -> RawGraph {
        let mut citations = self.citations.clone();
        citations.extend(self.dangling.iter().cloned());
        RawGraph {
            papers: self.papers.clone(),
            authorships: self.authorships.clone(),
            citations,
            keywords: self.keywords.clone(),
        }
    }
}
