//! Fractional relevance scores and the dense (conference, affiliation, year)
//! panel they are laid out in.
//!
//! A paper is worth one unit. The unit is split equally over its distinct
//! authors, and each author's part equally over the distinct affiliations
//! that author lists on the paper. Authors without an affiliation take their
//! part with them (it is not redistributed).

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::ops::RangeInclusive;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{AffiliationId, AuthorId, ConferenceId, PaperId};
use crate::ingest::{AuthorshipLink, CorpusSnapshot, PaperRecord};
use crate::tsv;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaperFilter {
    FullResearchOnly,
    #[default]
    AllPapers,
}

impl PaperFilter {
    pub fn admits(self, paper: &PaperRecord) -> bool {
        match self {
            PaperFilter::FullResearchOnly => paper.is_full_research,
            PaperFilter::AllPapers => true,
        }
    }
}

impl std::str::FromStr for PaperFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full_research_only" | "full" => Ok(PaperFilter::FullResearchOnly),
            "all_papers" | "all" => Ok(PaperFilter::AllPapers),
            other => Err(Error::InvalidParameter(format!("unknown paper filter `{other}`"))),
        }
    }
}

/// One paper's score split over affiliations.
#[derive(Debug, Clone, PartialEq)]
pub struct AffiliationShares {
    pub shares: BTreeMap<AffiliationId, f64>,
    /// Mass held by authors with no affiliation on the paper.
    pub deficit: f64,
}

pub fn paper_affiliation_shares(paper: &PaperId, links: &[AuthorshipLink]) -> Result<AffiliationShares> {
    let mut authors: BTreeMap<&AuthorId, BTreeSet<&AffiliationId>> = BTreeMap::new();
    for link in links {
        let entry = authors.entry(&link.author_id).or_default();
        if let Some(aff) = &link.affiliation_id {
            entry.insert(aff);
        }
    }
    if authors.is_empty() {
        return Err(Error::UnattributablePaper(paper.clone()));
    }
    let per_author = 1.0 / authors.len() as f64;
    let mut shares: BTreeMap<AffiliationId, f64> = BTreeMap::new();
    let mut deficit = 0.0;
    for affs in authors.values() {
        if affs.is_empty() {
            deficit += per_author;
            continue;
        }
        let part = per_author / affs.len() as f64;
        for &aff in affs {
            *shares.entry(aff.clone()).or_insert(0.0) += part;
        }
    }
    Ok(AffiliationShares { shares, deficit })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceCell {
    pub conference: ConferenceId,
    pub affiliation: AffiliationId,
    pub year: i32,
    pub relevance: f64,
    /// Whole papers with at least one author at the affiliation.
    pub paper_count: u32,
}

/// Dense grid of relevance over conferences × affiliations × years.
///
/// Every combination is present; absent combinations hold zero. Cells are
/// stored conference-major then affiliation, so the yearly series of one
/// (conference, affiliation) pair is a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevancePanel {
    conferences: Vec<ConferenceId>,
    affiliations: Vec<AffiliationId>,
    first_year: i32,
    last_year: i32,
    relevance: Vec<f64>,
    paper_count: Vec<u32>,
    /// Unattributed mass per (conference, year).
    deficit: Vec<f64>,
    filter: PaperFilter,
}

impl RelevancePanel {
    /// An all-zero panel. Affiliations are sorted and deduplicated; the
    /// conference order is kept (first occurrence wins).
    pub fn zeros(
        conferences: impl IntoIterator<Item = ConferenceId>,
        affiliations: impl IntoIterator<Item = AffiliationId>,
        years: RangeInclusive<i32>,
        filter: PaperFilter,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let conferences: Vec<ConferenceId> = conferences
            .into_iter()
            .filter(|c| seen.insert(c.clone()))
            .collect();
        let affiliations: Vec<AffiliationId> = affiliations
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if conferences.is_empty() {
            return Err(Error::InvalidParameter("panel needs at least one conference".into()));
        }
        if years.is_empty() {
            return Err(Error::InvalidParameter("panel needs a nonempty year range".into()));
        }
        let n_years = (years.end() - years.start() + 1) as usize;
        let cells = conferences.len() * affiliations.len() * n_years;
        Ok(Self {
            deficit: vec![0.0; conferences.len() * n_years],
            conferences,
            affiliations,
            first_year: *years.start(),
            last_year: *years.end(),
            relevance: vec![0.0; cells],
            paper_count: vec![0; cells],
            filter,
        })
    }

    /// Builds a panel from explicit cells; unlisted combinations are zero.
    pub fn from_cells(
        conferences: impl IntoIterator<Item = ConferenceId>,
        affiliations: impl IntoIterator<Item = AffiliationId>,
        years: RangeInclusive<i32>,
        filter: PaperFilter,
        cells: impl IntoIterator<Item = RelevanceCell>,
    ) -> Result<Self> {
        let mut panel = Self::zeros(conferences, affiliations, years, filter)?;
        let mut filled = BTreeSet::new();
        for cell in cells {
            let idx = panel.index_of(&cell.conference, &cell.affiliation, cell.year).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "cell ({}, {}, {}) lies outside the panel",
                    cell.conference, cell.affiliation, cell.year
                ))
            })?;
            if !filled.insert(idx) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate cell ({}, {}, {})",
                    cell.conference, cell.affiliation, cell.year
                )));
            }
            if !cell.relevance.is_finite() || cell.relevance < 0.0 {
                return Err(Error::NegativeRelevance(cell.relevance));
            }
            panel.relevance[idx] = cell.relevance;
            panel.paper_count[idx] = cell.paper_count;
        }
        Ok(panel)
    }

    pub fn conferences(&self) -> &[ConferenceId] {
        &self.conferences
    }

    /// Sorted.
    pub fn affiliations(&self) -> &[AffiliationId] {
        &self.affiliations
    }

    pub fn years(&self) -> RangeInclusive<i32> {
        self.first_year..=self.last_year
    }

    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.last_year
    }

    pub fn n_years(&self) -> usize {
        (self.last_year - self.first_year + 1) as usize
    }

    pub fn filter(&self) -> PaperFilter {
        self.filter
    }

    pub fn len(&self) -> usize {
        self.relevance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relevance.is_empty()
    }

    pub fn conference_index(&self, id: &ConferenceId) -> Option<usize> {
        self.conferences.iter().position(|c| c == id)
    }

    pub fn affiliation_index(&self, id: &AffiliationId) -> Option<usize> {
        self.affiliations.binary_search(id).ok()
    }

    pub fn year_index(&self, year: i32) -> Option<usize> {
        self.years().contains(&year).then(|| (year - self.first_year) as usize)
    }

    fn offset(&self, conf: usize, aff: usize) -> usize {
        (conf * self.affiliations.len() + aff) * self.n_years()
    }

    fn index_of(&self, conf: &ConferenceId, aff: &AffiliationId, year: i32) -> Option<usize> {
        let c = self.conference_index(conf)?;
        let a = self.affiliation_index(aff)?;
        let y = self.year_index(year)?;
        Some(self.offset(c, a) + y)
    }

    pub fn relevance(&self, conf: &ConferenceId, aff: &AffiliationId, year: i32) -> Option<f64> {
        self.index_of(conf, aff, year).map(|i| self.relevance[i])
    }

    pub fn paper_count(&self, conf: &ConferenceId, aff: &AffiliationId, year: i32) -> Option<u32> {
        self.index_of(conf, aff, year).map(|i| self.paper_count[i])
    }

    /// Yearly relevance of one pair, first year first.
    pub fn series(&self, conf: usize, aff: usize) -> &[f64] {
        let start = self.offset(conf, aff);
        &self.relevance[start..start + self.n_years()]
    }

    pub fn count_series(&self, conf: usize, aff: usize) -> &[u32] {
        let start = self.offset(conf, aff);
        &self.paper_count[start..start + self.n_years()]
    }

    /// Relevance of every affiliation at one conference and year.
    pub fn year_slice(&self, conf: usize, year: i32) -> Option<BTreeMap<AffiliationId, f64>> {
        let y = self.year_index(year)?;
        Some(
            self.affiliations
                .iter()
                .enumerate()
                .map(|(a, id)| (id.clone(), self.relevance[self.offset(conf, a) + y]))
                .collect(),
        )
    }

    pub fn deficit(&self, conf: usize, year: i32) -> Option<f64> {
        self.year_index(year).map(|y| self.deficit[conf * self.n_years() + y])
    }

    /// Sum of relevance over affiliations at one conference and year.
    pub fn total(&self, conf: usize, year: i32) -> Option<f64> {
        let y = self.year_index(year)?;
        Some(
            (0..self.affiliations.len())
                .map(|a| self.relevance[self.offset(conf, a) + y])
                .sum(),
        )
    }

    pub fn cells(&self) -> impl Iterator<Item = RelevanceCell> + '_ {
        let n_years = self.n_years();
        self.conferences.iter().enumerate().flat_map(move |(c, conf)| {
            self.affiliations.iter().enumerate().flat_map(move |(a, aff)| {
                (0..n_years).map(move |y| {
                    let i = self.offset(c, a) + y;
                    RelevanceCell {
                        conference: conf.clone(),
                        affiliation: aff.clone(),
                        year: self.first_year + y as i32,
                        relevance: self.relevance[i],
                        paper_count: self.paper_count[i],
                    }
                })
            })
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelOptions {
    /// Keep only the affiliations with the largest total relevance.
    pub affiliation_cap: Option<usize>,
}

/// Lays out the relevance of every qualifying paper in a dense panel.
///
/// A paper qualifies when it belongs to one of `conferences`, falls inside
/// `years` and passes `filter`. The affiliation universe is every affiliation
/// scoring above zero somewhere in the panel, optionally capped.
pub fn build_panel(
    snapshot: &CorpusSnapshot,
    conferences: &[ConferenceId],
    years: RangeInclusive<i32>,
    filter: PaperFilter,
    options: &PanelOptions,
) -> Result<RelevancePanel> {
    let conf_index: BTreeMap<&ConferenceId, usize> = {
        let mut m = BTreeMap::new();
        for c in conferences {
            let next = m.len();
            m.entry(c).or_insert(next);
        }
        m
    };
    if conf_index.is_empty() {
        return Err(Error::InvalidParameter("panel needs at least one conference".into()));
    }
    if years.is_empty() {
        return Err(Error::InvalidParameter("panel needs a nonempty year range".into()));
    }
    let n_years = (years.end() - years.start() + 1) as usize;

    type Key = (usize, usize);
    let mut acc: BTreeMap<(AffiliationId, Key), (f64, u32)> = BTreeMap::new();
    let mut deficit = vec![0.0; conf_index.len() * n_years];
    let mut seen_conf = vec![false; conf_index.len()];
    // Snapshot papers are sorted by id, which fixes the summation order.
    for paper in snapshot.papers() {
        let Some(&c) = paper.conference.as_ref().and_then(|c| conf_index.get(c)) else {
            continue;
        };
        if !years.contains(&paper.year) || !filter.admits(paper) {
            continue;
        }
        seen_conf[c] = true;
        let y = (paper.year - years.start()) as usize;
        match paper_affiliation_shares(&paper.paper_id, snapshot.links_of(&paper.paper_id)) {
            Ok(split) => {
                deficit[c * n_years + y] += split.deficit;
                for (aff, share) in split.shares {
                    let cell = acc.entry((aff, (c, y))).or_insert((0.0, 0));
                    cell.0 += share;
                    cell.1 += 1;
                }
            }
            Err(_) => {
                log::warn!("paper {} has no authorship links; its score is unattributed", paper.paper_id);
                deficit[c * n_years + y] += 1.0;
            }
        }
    }
    for (conf, &c) in &conf_index {
        if !seen_conf[c] {
            log::warn!("conference {conf} has no qualifying papers in {years:?}");
        }
    }

    let mut totals: BTreeMap<&AffiliationId, f64> = BTreeMap::new();
    for ((aff, _), (rel, _)) in &acc {
        *totals.entry(aff).or_insert(0.0) += rel;
    }
    let mut universe: Vec<&AffiliationId> = totals.keys().copied().collect();
    if let Some(cap) = options.affiliation_cap {
        universe.sort_by(|a, b| totals[b].total_cmp(&totals[a]).then_with(|| a.cmp(b)));
        universe.truncate(cap);
    }

    let mut ordered: Vec<ConferenceId> = vec![ConferenceId::new(""); conf_index.len()];
    for (conf, &c) in &conf_index {
        ordered[c] = (*conf).clone();
    }
    let mut panel = RelevancePanel::zeros(ordered, universe.into_iter().cloned(), years, filter)?;
    panel.deficit = deficit;
    for ((aff, (c, y)), (rel, count)) in &acc {
        if let Some(a) = panel.affiliation_index(aff) {
            let i = panel.offset(*c, a) + y;
            panel.relevance[i] = *rel;
            panel.paper_count[i] = *count;
        }
    }
    Ok(panel)
}

/// Whole-paper counts per affiliation at one conference over a year range.
pub fn affiliation_paper_counts(
    snapshot: &CorpusSnapshot,
    conference: &ConferenceId,
    years: RangeInclusive<i32>,
    filter: PaperFilter,
) -> BTreeMap<AffiliationId, u64> {
    let mut counts = BTreeMap::new();
    for paper in snapshot.papers() {
        if paper.conference.as_ref() != Some(conference)
            || !years.contains(&paper.year)
            || !filter.admits(paper)
        {
            continue;
        }
        let affs: BTreeSet<&AffiliationId> = snapshot
            .links_of(&paper.paper_id)
            .iter()
            .filter_map(|l| l.affiliation_id.as_ref())
            .collect();
        for aff in affs {
            *counts.entry(aff.clone()).or_insert(0) += 1;
        }
    }
    counts
}

pub const PANEL_FILE: &str = "panel.tsv";
pub const PANEL_MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelManifest {
    pub filter: PaperFilter,
    pub first_year: i32,
    pub last_year: i32,
    pub conferences: Vec<ConferenceId>,
    pub affiliations: usize,
    /// Unattributed mass per conference, indexed by year offset.
    pub deficits: BTreeMap<ConferenceId, Vec<f64>>,
}

/// Writes `panel.tsv` (conference, affiliation, year, relevance, paper_count)
/// and `manifest.json` into `dir`.
pub fn write_panel(dir: &Path, panel: &RelevancePanel) -> Result<()> {
    let path = dir.join(PANEL_FILE);
    let mut w = tsv::create(&path)?;
    tsv::write_line(&mut w, &path, &["conference", "affiliation", "year", "relevance", "paper_count"])?;
    for cell in panel.cells() {
        tsv::write_line(
            &mut w,
            &path,
            &[
                cell.conference.as_str(),
                cell.affiliation.as_str(),
                &cell.year.to_string(),
                &tsv::fmt_f64(cell.relevance),
                &cell.paper_count.to_string(),
            ],
        )?;
    }
    tsv::finish(w, &path)?;

    let n = panel.n_years();
    let manifest = PanelManifest {
        filter: panel.filter,
        first_year: panel.first_year,
        last_year: panel.last_year,
        conferences: panel.conferences.clone(),
        affiliations: panel.affiliations.len(),
        deficits: panel
            .conferences
            .iter()
            .enumerate()
            .map(|(c, id)| (id.clone(), panel.deficit[c * n..(c + 1) * n].to_vec()))
            .collect(),
    };
    tsv::write_json(&dir.join(PANEL_MANIFEST_FILE), &manifest)
}

pub fn read_panel(dir: &Path) -> Result<RelevancePanel> {
    let manifest: PanelManifest = tsv::read_json(&dir.join(PANEL_MANIFEST_FILE))?;
    let path = dir.join(PANEL_FILE);
    let reader = tsv::open(&path)?;
    let mut cells = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(&path, e))?;
        if i == 0 || line.is_empty() {
            continue;
        }
        let malformed = |reason: &str| Error::Malformed {
            path: path.clone(),
            line: i + 1,
            reason: reason.to_owned(),
        };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(malformed("expected 5 columns"));
        }
        cells.push(RelevanceCell {
            conference: f[0].into(),
            affiliation: f[1].into(),
            year: f[2].parse().map_err(|_| malformed("bad year"))?,
            relevance: f[3].parse().map_err(|_| malformed("bad relevance"))?,
            paper_count: f[4].parse().map_err(|_| malformed("bad paper count"))?,
        });
    }
    let affiliations: Vec<AffiliationId> = cells.iter().map(|c| c.affiliation.clone()).collect();
    let mut panel = RelevancePanel::from_cells(
        manifest.conferences.clone(),
        affiliations,
        manifest.first_year..=manifest.last_year,
        manifest.filter,
        cells,
    )?;
    let n = panel.n_years();
    for (c, conf) in manifest.conferences.iter().enumerate() {
        if let Some(d) = manifest.deficits.get(conf) {
            if d.len() == n {
                panel.deficit[c * n..(c + 1) * n].copy_from_slice(d);
            }
        }
    }
    Ok(panel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(p: &str, a: &str, aff: Option<&str>) -> AuthorshipLink {
        AuthorshipLink {
            paper_id: p.into(),
            author_id: a.into(),
            affiliation_id: aff.map(Into::into),
            author_sequence: 1,
        }
    }

    fn paper(id: &str, conf: &str, year: i32, full: bool) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            year,
            conference: Some(conf.into()),
            is_full_research: full,
        }
    }

    fn share(s: &AffiliationShares, aff: &str) -> f64 {
        s.shares[&AffiliationId::from(aff)]
    }

    #[test]
    fn split_over_authors_then_affiliations() {
        let links = [link("p", "a1", Some("A")), link("p", "a2", Some("A")), link("p", "a2", Some("B"))];
        let s = paper_affiliation_shares(&"p".into(), &links).unwrap();
        assert_eq!(share(&s, "A"), 0.75);
        assert_eq!(share(&s, "B"), 0.25);
        assert_eq!(s.deficit, 0.0);
    }

    #[test]
    fn single_author_takes_everything() {
        let s = paper_affiliation_shares(&"p".into(), &[link("p", "a", Some("A"))]).unwrap();
        assert_eq!(share(&s, "A"), 1.0);
    }

    #[test]
    fn unaffiliated_author_mass_is_dropped() {
        let s = paper_affiliation_shares(&"p".into(), &[link("p", "a1", Some("A")), link("p", "a2", None)]).unwrap();
        assert_eq!(share(&s, "A"), 0.5);
        assert_eq!(s.deficit, 0.5);
        assert_eq!(s.shares.len(), 1);
    }

    #[test]
    fn duplicate_rows_do_not_double_count() {
        let links = [link("p", "a1", Some("A")), link("p", "a1", Some("A")), link("p", "a2", Some("B"))];
        let s = paper_affiliation_shares(&"p".into(), &links).unwrap();
        assert_eq!(share(&s, "A"), 0.5);
    }

    #[test]
    fn no_links_is_unattributable() {
        assert!(matches!(
            paper_affiliation_shares(&"p".into(), &[]),
            Err(Error::UnattributablePaper(_))
        ));
    }

    fn one_paper_snapshot(full: bool) -> CorpusSnapshot {
        CorpusSnapshot::from_records(
            vec![paper("p", "c1", 2014, full), paper("q", "c9", 2014, true)],
            vec![
                link("p", "a1", Some("A")),
                link("p", "a2", Some("A")),
                link("p", "a2", Some("B")),
                link("q", "a3", Some("Z")),
            ],
            vec![],
            vec![],
        )
    }

    #[test]
    fn single_paper_panel() {
        let snap = one_paper_snapshot(true);
        let confs = ["c1".into(), "c2".into()];
        let panel = build_panel(&snap, &confs, 2013..=2015, PaperFilter::AllPapers, &PanelOptions::default()).unwrap();
        assert_eq!(panel.affiliations(), &["A".into(), "B".into()]);
        assert_eq!(panel.len(), 2 * 2 * 3);
        assert_eq!(panel.relevance(&"c1".into(), &"A".into(), 2014), Some(0.75));
        assert_eq!(panel.relevance(&"c1".into(), &"B".into(), 2014), Some(0.25));
        assert_eq!(panel.paper_count(&"c1".into(), &"B".into(), 2014), Some(1));
        let nonzero = panel.cells().filter(|c| c.relevance > 0.0).count();
        assert_eq!(nonzero, 2);
        assert_eq!(panel.total(0, 2014), Some(1.0));
    }

    #[test]
    fn empty_snapshot_gives_zero_panel() {
        let confs = ["c1".into()];
        let panel = build_panel(&CorpusSnapshot::empty(), &confs, 2010..=2012, PaperFilter::AllPapers, &PanelOptions::default()).unwrap();
        assert!(panel.cells().all(|c| c.relevance == 0.0));
        assert_eq!(panel.affiliations().len(), 0);
    }

    #[test]
    fn full_research_filter() {
        let snap = one_paper_snapshot(false);
        let confs = ["c1".into()];
        let opts = PanelOptions::default();
        let full = build_panel(&snap, &confs, 2014..=2014, PaperFilter::FullResearchOnly, &opts).unwrap();
        assert!(full.cells().all(|c| c.relevance == 0.0));
        let all = build_panel(&snap, &confs, 2014..=2014, PaperFilter::AllPapers, &opts).unwrap();
        assert!(all.cells().any(|c| c.relevance > 0.0));
    }

    #[test]
    fn affiliation_cap_keeps_largest() {
        let snap = one_paper_snapshot(true);
        let panel = build_panel(
            &snap,
            &["c1".into()],
            2014..=2014,
            PaperFilter::AllPapers,
            &PanelOptions { affiliation_cap: Some(1) },
        )
        .unwrap();
        assert_eq!(panel.affiliations(), &["A".into()]);
    }

    #[test]
    fn bad_panel_arguments() {
        let snap = CorpusSnapshot::empty();
        let o = PanelOptions::default();
        assert!(build_panel(&snap, &[], 2010..=2012, PaperFilter::AllPapers, &o).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let r = build_panel(&snap, &["c".into()], 2012..=2010, PaperFilter::AllPapers, &o);
        assert!(r.is_err());
    }

    #[test]
    fn whole_paper_counts() {
        let snap = CorpusSnapshot::from_records(
            vec![paper("p1", "c", 2014, true), paper("p2", "c", 2015, true)],
            vec![
                link("p1", "x", Some("A")),
                link("p1", "y", Some("A")),
                link("p1", "z", Some("B")),
                link("p2", "x", Some("A")),
            ],
            vec![],
            vec![],
        );
        let counts = affiliation_paper_counts(&snap, &"c".into(), 2014..=2015, PaperFilter::AllPapers);
        assert_eq!(counts[&AffiliationId::from("A")], 2);
        assert_eq!(counts[&AffiliationId::from("B")], 1);
        let one = affiliation_paper_counts(&snap, &"c".into(), 2014..=2014, PaperFilter::AllPapers);
        assert_eq!(one[&AffiliationId::from("A")], 1);
        #[allow(clippy::reversed_empty_ranges)]
        let none = affiliation_paper_counts(&snap, &"c".into(), 2016..=2015, PaperFilter::AllPapers);
        assert!(none.is_empty());
    }

    #[test]
    fn from_cells_rejects_duplicates() {
        let cell = RelevanceCell {
            conference: "c".into(),
            affiliation: "A".into(),
            year: 2000,
            relevance: 1.0,
            paper_count: 1,
        };
        let r = RelevancePanel::from_cells(
            ["c".into()],
            ["A".into()],
            2000..=2000,
            PaperFilter::AllPapers,
            [cell.clone(), cell],
        );
        assert!(r.is_err());
    }

    #[test]
    fn panel_round_trip() {
        let snap = one_paper_snapshot(true);
        let panel = build_panel(&snap, &["c1".into(), "c9".into()], 2013..=2015, PaperFilter::AllPapers, &PanelOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_panel(dir.path(), &panel).unwrap();
        assert_eq!(read_panel(dir.path()).unwrap(), panel);
    }
}
