use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{CitationEdge, CorpusSnapshot, Degree, RawGraph};
use crate::error::{Error, Result};
use crate::ids::{AuthorId, ConferenceId, PaperId};

/// Which citation edges the corpus BFS follows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BfsDirection {
    /// From a paper to its references.
    #[default]
    Out,
    /// From a paper to the papers citing it.
    In,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleParams {
    pub target_conferences: BTreeSet<ConferenceId>,
    /// Inclusive year range of the seed papers.
    pub seed_years: (i32, i32),
    /// Earliest year of the co-authored papers pulled in through seed authors.
    pub author_floor_year: i32,
    pub bfs_depth: usize,
    #[serde(default)]
    pub direction: BfsDirection,
}

impl SampleParams {
    /// Seeds 2011-2015, authors' papers since 2000, two reference hops.
    pub fn new(targets: impl IntoIterator<Item = ConferenceId>) -> Self {
        Self {
            target_conferences: targets.into_iter().collect(),
            seed_years: (2011, 2015),
            author_floor_year: 2000,
            bfs_depth: 2,
            direction: BfsDirection::Out,
        }
    }
}

/// Samples the working corpus from the full graph.
///
/// 1. Seeds: papers of the target conferences within `seed_years`.
/// 2. Every paper since `author_floor_year` written by an author of a seed.
/// 3. Everything reachable from 1 and 2 within `bfs_depth` citation hops in
///    the configured direction.
///
/// The frontier is expanded in sorted id order so the result does not depend
/// on input order.
pub fn sample_corpus(graph: &RawGraph, params: &SampleParams) -> Result<CorpusSnapshot> {
    let (lo, hi) = params.seed_years;
    if lo > hi {
        return Err(Error::InvalidParameter(format!("empty seed year range {lo}..={hi}")));
    }
    if params.author_floor_year > lo {
        return Err(Error::InvalidParameter(format!(
            "author floor year {} is after the seed range start {lo}",
            params.author_floor_year
        )));
    }

    let years: HashMap<&PaperId, i32> = graph.papers.iter().map(|p| (&p.paper_id, p.year)).collect();

    let seeds: BTreeSet<&PaperId> = graph
        .papers
        .iter()
        .filter(|p| {
            (lo..=hi).contains(&p.year)
                && p.conference
                    .as_ref()
                    .is_some_and(|c| params.target_conferences.contains(c))
        })
        .map(|p| &p.paper_id)
        .collect();
    if seeds.is_empty() {
        return Err(Error::NoSeedPapers);
    }

    let seed_authors: HashSet<&AuthorId> = graph
        .authorships
        .iter()
        .filter(|l| seeds.contains(&l.paper_id))
        .map(|l| &l.author_id)
        .collect();

    let mut visited: BTreeSet<&PaperId> = seeds.clone();
    for link in &graph.authorships {
        if seed_authors.contains(&link.author_id)
            && years
                .get(&link.paper_id)
                .is_some_and(|&y| y >= params.author_floor_year)
        {
            visited.insert(&link.paper_id);
        }
    }

    let mut neighbours: HashMap<&PaperId, Vec<&PaperId>> = HashMap::new();
    for edge in &graph.citations {
        if edge.citing == edge.cited
            || !years.contains_key(&edge.citing)
            || !years.contains_key(&edge.cited)
        {
            continue;
        }
        if matches!(params.direction, BfsDirection::Out | BfsDirection::Both) {
            neighbours.entry(&edge.citing).or_default().push(&edge.cited);
        }
        if matches!(params.direction, BfsDirection::In | BfsDirection::Both) {
            neighbours.entry(&edge.cited).or_default().push(&edge.citing);
        }
    }

    let mut frontier: BTreeSet<&PaperId> = visited.clone();
    for _ in 0..params.bfs_depth {
        let mut next = BTreeSet::new();
        for id in &frontier {
            for &n in neighbours.get(id).map(Vec::as_slice).unwrap_or(&[]) {
                if !visited.contains(n) {
                    next.insert(n);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        visited.extend(next.iter().copied());
        frontier = next;
    }

    let papers = graph
        .papers
        .iter()
        .filter(|p| visited.contains(&p.paper_id))
        .cloned()
        .collect();
    let authorships = graph
        .authorships
        .iter()
        .filter(|l| visited.contains(&l.paper_id))
        .cloned()
        .collect();
    // Edges to papers that exist in the dump but were not sampled are dropped;
    // edges to papers absent from the dump survive as dangling.
    let citations = graph
        .citations
        .iter()
        .filter(|e| {
            visited.contains(&e.citing)
                && (visited.contains(&e.cited) || !years.contains_key(&e.cited))
        })
        .cloned()
        .collect();
    let keywords = graph
        .keywords
        .iter()
        .filter(|k| visited.contains(&k.paper_id))
        .cloned()
        .collect();
    Ok(CorpusSnapshot::from_records(papers, authorships, citations, keywords))
}

/// In/out degrees of `papers` over the edges whose endpoints are both listed.
///
/// Duplicate edges count once, self-citations not at all; papers without
/// edges get `(0, 0)`.
pub fn compute_degrees<'a>(
    papers: impl IntoIterator<Item = &'a PaperId>,
    edges: &[CitationEdge],
) -> BTreeMap<PaperId, Degree> {
    let mut degrees: BTreeMap<PaperId, Degree> = papers
        .into_iter()
        .map(|p| (p.clone(), Degree::default()))
        .collect();
    let unique: BTreeSet<&CitationEdge> = edges.iter().filter(|e| e.citing != e.cited).collect();
    for edge in unique {
        if !degrees.contains_key(&edge.citing) || !degrees.contains_key(&edge.cited) {
            continue;
        }
        if let Some(d) = degrees.get_mut(&edge.citing) {
            d.out_degree += 1;
        }
        if let Some(d) = degrees.get_mut(&edge.cited) {
            d.in_degree += 1;
        }
    }
    degrees
}
