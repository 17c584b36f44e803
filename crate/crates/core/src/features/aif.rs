//! Author impact factor: citations an author's recent papers collect in a
//! given year, per paper.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::stats::{series_stats, SeriesStats};
use crate::ids::{AffiliationId, AuthorId, ConferenceId, PaperId};
use crate::ingest::CorpusSnapshot;

/// Default publication window for the impact factor, in years.
pub const DEFAULT_AIF_WINDOW: i32 = 2;

/// Per-author publication lists and per-paper citation years.
#[derive(Debug, Clone, Default)]
pub struct AifIndex {
    papers_by_author: BTreeMap<AuthorId, Vec<(i32, PaperId)>>,
    citing_years: HashMap<PaperId, Vec<i32>>,
}

impl AifIndex {
    pub fn from_snapshot(snapshot: &CorpusSnapshot) -> Self {
        let mut papers_by_author: BTreeMap<AuthorId, Vec<(i32, PaperId)>> = BTreeMap::new();
        for link in snapshot.authorships() {
            if let Some(p) = snapshot.paper(&link.paper_id) {
                papers_by_author
                    .entry(link.author_id.clone())
                    .or_default()
                    .push((p.year, p.paper_id.clone()));
            }
        }
        for papers in papers_by_author.values_mut() {
            papers.sort();
            papers.dedup();
        }
        let mut citing_years: HashMap<PaperId, Vec<i32>> = HashMap::new();
        for edge in snapshot.citations() {
            if let Some(citing) = snapshot.paper(&edge.citing) {
                citing_years.entry(edge.cited.clone()).or_default().push(citing.year);
            }
        }
        Self {
            papers_by_author,
            citing_years,
        }
    }

    /// Impact factor of `author` in `year` over papers published in
    /// `[year - window, year - 1]`; `None` when that window holds no papers.
    pub fn author_aif(&self, author: &AuthorId, year: i32, window: i32) -> Option<f64> {
        let papers = self.papers_by_author.get(author)?;
        let lo = year - window.max(1);
        let in_window: Vec<&PaperId> = papers
            .iter()
            .filter(|(y, _)| (lo..year).contains(y))
            .map(|(_, id)| id)
            .collect();
        if in_window.is_empty() {
            return None;
        }
        let citations: usize = in_window
            .iter()
            .map(|id| {
                self.citing_years
                    .get(*id)
                    .map_or(0, |ys| ys.iter().filter(|&&y| y == year).count())
            })
            .sum();
        Some(citations as f64 / in_window.len() as f64)
    }
}

/// Statistics over the defined impact factors of a group of authors.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AifStats {
    /// All zeros when `present` is false.
    pub stats: SeriesStats,
    pub present: bool,
}

pub fn aif_stats(values: impl IntoIterator<Item = Option<f64>>) -> AifStats {
    let defined: Vec<f64> = values.into_iter().flatten().collect();
    match series_stats(&defined) {
        Ok(stats) => AifStats {
            stats,
            present: true,
        },
        Err(_) => AifStats::default(),
    }
}

/// Who published for each affiliation at each conference, and when.
#[derive(Debug, Clone, Default)]
pub struct AifContext {
    index: AifIndex,
    authors: BTreeMap<(ConferenceId, AffiliationId), BTreeMap<AuthorId, i32>>,
    window: i32,
}

impl AifContext {
    pub fn from_snapshot(snapshot: &CorpusSnapshot, window: i32) -> Self {
        let mut authors: BTreeMap<(ConferenceId, AffiliationId), BTreeMap<AuthorId, i32>> = BTreeMap::new();
        for link in snapshot.authorships() {
            let (Some(aff), Some(paper)) = (&link.affiliation_id, snapshot.paper(&link.paper_id)) else {
                continue;
            };
            let Some(conf) = &paper.conference else { continue };
            let first = authors
                .entry((conf.clone(), aff.clone()))
                .or_default()
                .entry(link.author_id.clone())
                .or_insert(paper.year);
            *first = (*first).min(paper.year);
        }
        Self {
            index: AifIndex::from_snapshot(snapshot),
            authors,
            window,
        }
    }

    pub fn index(&self) -> &AifIndex {
        &self.index
    }

    /// Authors who published for `aff` at `conf` before `target_year`.
    pub fn authors_before(&self, conf: &ConferenceId, aff: &AffiliationId, target_year: i32) -> BTreeSet<&AuthorId> {
        self.authors
            .get(&(conf.clone(), aff.clone()))
            .map(|m| m.iter().filter(|(_, &y)| y < target_year).map(|(a, _)| a).collect())
            .unwrap_or_default()
    }

    /// Impact-factor statistics over those authors for every year in
    /// `first_year..target_year`.
    pub fn stats(&self, conf: &ConferenceId, aff: &AffiliationId, first_year: i32, target_year: i32) -> AifStats {
        let authors = self.authors_before(conf, aff, target_year);
        aif_stats(authors.into_iter().flat_map(|author| {
            (first_year..target_year).map(move |y| self.index.author_aif(author, y, self.window))
        }))
    }
}
