use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{AffiliationId, ConferenceId};
use crate::tsv;

pub const DEFAULT_K: usize = 20;

/// Σ_{i=1..min(k,n)} rel_i / log₂(i+1).
pub fn dcg(relevances: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("NDCG cutoff k must be at least 1".into()));
    }
    let mut total = 0.0;
    for (i, &rel) in relevances.iter().take(k).enumerate() {
        if !rel.is_finite() || rel < 0.0 {
            return Err(Error::NegativeRelevance(rel));
        }
        total += rel / ((i + 2) as f64).log2();
    }
    Ok(total)
}

/// Affiliations in submission order with the scores that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub conference: ConferenceId,
    pub year: i32,
    entries: Vec<(AffiliationId, f64)>,
}

impl RankedList {
    /// Sorts by descending score, then descending `recent` relevance (the
    /// latest known year), then affiliation id.
    pub fn rank(
        conference: ConferenceId,
        year: i32,
        scores: Vec<(AffiliationId, f64)>,
        recent: &BTreeMap<AffiliationId, f64>,
    ) -> Result<Self> {
        let mut entries = scores;
        let recent_of = |a: &AffiliationId| recent.get(a).copied().unwrap_or(0.0);
        entries.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| recent_of(&b.0).total_cmp(&recent_of(&a.0)))
                .then_with(|| a.0.cmp(&b.0))
        });
        Self::from_ordered(conference, year, entries)
    }

    /// Keeps the given order; only checks that no affiliation repeats.
    pub fn from_ordered(conference: ConferenceId, year: i32, entries: Vec<(AffiliationId, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (a, _) in &entries {
            if !seen.insert(a) {
                return Err(Error::DuplicateAffiliation(a.clone()));
            }
        }
        Ok(Self {
            conference,
            year,
            entries,
        })
    }

    pub fn entries(&self) -> &[(AffiliationId, f64)] {
        &self.entries
    }

    pub fn affiliations(&self) -> impl Iterator<Item = &AffiliationId> {
        self.entries.iter().map(|e| &e.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdcgReport {
    pub conference: ConferenceId,
    pub year: i32,
    pub k: usize,
    pub dcg: f64,
    pub idcg: f64,
    pub ndcg: f64,
    /// The truth was all zero, so NDCG is reported as 0 by convention.
    pub degenerate: bool,
}

pub fn ndcg_at_k(predicted: &RankedList, truth: &BTreeMap<AffiliationId, f64>, k: usize) -> Result<NdcgReport> {
    if truth.is_empty() {
        return Err(Error::EmptyInput("NDCG needs a nonempty truth"));
    }
    let gains: Vec<f64> = predicted
        .affiliations()
        .take(k)
        .map(|a| truth.get(a).copied().unwrap_or(0.0))
        .collect();
    let mut ideal: Vec<f64> = truth.values().copied().collect();
    ideal.sort_by(|a, b| b.total_cmp(a));
    // Sorting puts any negative value last, past the cutoff; check all of them.
    dcg(&ideal[ideal.len() - 1..], 1)?;
    let dcg_value = dcg(&gains, k)?;
    let idcg = dcg(&ideal, k)?;
    let degenerate = idcg == 0.0;
    let ndcg = if degenerate { 0.0 } else { (dcg_value / idcg).min(1.0) };
    Ok(NdcgReport {
        conference: predicted.conference.clone(),
        year: predicted.year,
        k,
        dcg: dcg_value,
        idcg,
        ndcg,
        degenerate,
    })
}

/// Writes `rank, affiliation, score` rows with 1-based ranks.
pub fn write_ranking(path: &Path, list: &RankedList) -> Result<()> {
    let mut w = tsv::create(path)?;
    tsv::write_line(&mut w, path, &["rank", "affiliation", "score"])?;
    for (i, (a, s)) in list.entries().iter().enumerate() {
        tsv::write_line(&mut w, path, &[&(i + 1).to_string(), a.as_str(), &tsv::fmt_f64(*s)])?;
    }
    tsv::finish(w, path)
}

/// Reads a ranking file in file order. The rank column is informational.
pub fn read_ranking(path: &Path, conference: ConferenceId, year: i32) -> Result<RankedList> {
    let rows = read_pairs(path, &["rank", "affiliation", "score"], 1, 2)?;
    RankedList::from_ordered(conference, year, rows)
}

/// Reads `affiliation, relevance` rows, for example a panel year slice.
pub fn read_truth(path: &Path) -> Result<BTreeMap<AffiliationId, f64>> {
    let mut truth = BTreeMap::new();
    for (a, rel) in read_pairs(path, &["affiliation", "relevance"], 0, 1)? {
        if rel.is_nan() || rel < 0.0 {
            return Err(Error::NegativeRelevance(rel));
        }
        if truth.insert(a.clone(), rel).is_some() {
            return Err(Error::DuplicateAffiliation(a));
        }
    }
    Ok(truth)
}

pub fn write_truth(path: &Path, truth: &BTreeMap<AffiliationId, f64>) -> Result<()> {
    let mut w = tsv::create(path)?;
    tsv::write_line(&mut w, path, &["affiliation", "relevance"])?;
    for (a, rel) in truth {
        tsv::write_line(&mut w, path, &[a.as_str(), &tsv::fmt_f64(*rel)])?;
    }
    tsv::finish(w, path)
}

fn read_pairs(path: &Path, header: &[&str], id_col: usize, value_col: usize) -> Result<Vec<(AffiliationId, f64)>> {
    let reader = tsv::open(path)?;
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if i == 0 && fields.first() == header.first() {
            continue;
        }
        let malformed = |reason: String| Error::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        if fields.len() < header.len() {
            return Err(malformed(format!("expected {} fields, got {}", header.len(), fields.len())));
        }
        let value: f64 = fields[value_col]
            .trim()
            .parse()
            .map_err(|_| malformed(format!("bad number `{}`", fields[value_col])))?;
        if !value.is_finite() {
            return Err(malformed(format!("non-finite value `{}`", fields[value_col])));
        }
        out.push((AffiliationId::new(fields[id_col].trim()), value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(ids: &[&str]) -> RankedList {
        let entries = ids.iter().enumerate().map(|(i, a)| ((*a).into(), -(i as f64))).collect();
        RankedList::from_ordered("c".into(), 2015, entries).unwrap()
    }

    fn truth(items: &[(&str, f64)]) -> BTreeMap<AffiliationId, f64> {
        items.iter().map(|&(a, r)| (a.into(), r)).collect()
    }

    #[test]
    fn dcg_examples() {
        assert_eq!(dcg(&[3.0], 20).unwrap(), 3.0);
        let expected = 2.0 + 3.0 / 3f64.log2() + 0.5;
        assert!((dcg(&[2.0, 3.0, 1.0], 20).unwrap() - expected).abs() < 1e-15);
        assert!((dcg(&[2.0, 3.0, 1.0], 20).unwrap() - 4.3928).abs() < 1e-4);
        assert_eq!(dcg(&[], 5).unwrap(), 0.0);
        assert!(matches!(dcg(&[1.0, -0.5], 5), Err(Error::NegativeRelevance(_))));
        assert!(dcg(&[1.0], 0).is_err());
    }

    #[test]
    fn ndcg_examples() {
        let t = truth(&[("A", 3.0), ("B", 2.0), ("C", 1.0)]);
        assert_eq!(ndcg_at_k(&list(&["A", "B", "C"]), &t, 20).unwrap().ndcg, 1.0);
        let r = ndcg_at_k(&list(&["B", "A", "C"]), &t, 20).unwrap();
        assert!((r.dcg - 4.3928).abs() < 1e-4);
        assert!((r.idcg - 4.7619).abs() < 1e-4);
        assert!((r.ndcg - 0.9225).abs() < 1e-4);
        assert_eq!(ndcg_at_k(&list(&["X", "Y"]), &t, 20).unwrap().ndcg, 0.0);
    }

    #[test]
    fn all_zero_truth_is_flagged() {
        let r = ndcg_at_k(&list(&["A"]), &truth(&[("A", 0.0)]), 20).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.ndcg, 0.0);
        assert!(ndcg_at_k(&list(&["A"]), &BTreeMap::new(), 20).is_err());
    }

    #[test]
    fn duplicates_rejected() {
        let e = vec![("A".into(), 1.0), ("A".into(), 0.5)];
        assert!(matches!(
            RankedList::from_ordered("c".into(), 2015, e),
            Err(Error::DuplicateAffiliation(_))
        ));
    }

    #[test]
    fn rank_tie_break_chain() {
        let recent = truth(&[("B", 2.0), ("C", 2.0)]);
        let scores = vec![("C".into(), 1.0), ("A".into(), 1.0), ("B".into(), 1.0), ("D".into(), 5.0)];
        let r = RankedList::rank("c".into(), 2015, scores, &recent).unwrap();
        let order: Vec<&str> = r.affiliations().map(|a| a.as_str()).collect();
        assert_eq!(order, ["D", "B", "C", "A"]);
    }

    #[test]
    fn ranking_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let l = list(&["B", "A", "C"]);
        let p = dir.path().join("r.tsv");
        write_ranking(&p, &l).unwrap();
        assert_eq!(read_ranking(&p, "c".into(), 2015).unwrap(), l);
        let t = truth(&[("A", 0.25), ("B", 1.0 / 3.0)]);
        let tp = dir.path().join("t.tsv");
        write_truth(&tp, &t).unwrap();
        assert_eq!(read_truth(&tp).unwrap(), t);
    }
}
