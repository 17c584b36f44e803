//! Related conferences by Jaccard overlap of author and keyword sets.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{AuthorId, ConferenceId};
use crate::ingest::CorpusSnapshot;

/// `|a ∩ b| / |a ∪ b|`, with two empty sets scoring 0.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = union_size(a, b);
    if union == 0 {
        0.0
    } else {
        a.intersection(b).count() as f64 / union as f64
    }
}

fn union_size<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> usize {
    a.len() + b.len() - a.intersection(b).count()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConferenceProfile {
    pub conference: ConferenceId,
    pub authors: BTreeSet<AuthorId>,
    pub keywords: BTreeSet<String>,
}

/// Author and keyword sets of every conference series in the snapshot,
/// restricted to papers published in `years`.
pub fn build_profiles(snapshot: &CorpusSnapshot, years: RangeInclusive<i32>) -> BTreeMap<ConferenceId, ConferenceProfile> {
    let mut profiles: BTreeMap<ConferenceId, ConferenceProfile> = BTreeMap::new();
    for paper in snapshot.papers() {
        let Some(conf) = &paper.conference else { continue };
        if !years.contains(&paper.year) {
            continue;
        }
        let profile = profiles.entry(conf.clone()).or_insert_with(|| ConferenceProfile {
            conference: conf.clone(),
            ..ConferenceProfile::default()
        });
        profile
            .authors
            .extend(snapshot.links_of(&paper.paper_id).iter().map(|l| l.author_id.clone()));
        profile
            .keywords
            .extend(snapshot.keywords_of(&paper.paper_id).iter().map(|k| k.keyword.clone()));
    }
    profiles
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityBasis {
    #[default]
    Authors,
    Keywords,
    /// Mean reciprocal rank of the author and keyword rankings.
    RankFusion,
}

impl std::fmt::Display for SimilarityBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SimilarityBasis::Authors => "authors",
            SimilarityBasis::Keywords => "keywords",
            SimilarityBasis::RankFusion => "rank_fusion",
        })
    }
}

impl std::str::FromStr for SimilarityBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "authors" => Ok(Self::Authors),
            "keywords" => Ok(Self::Keywords),
            "rank_fusion" | "fusion" => Ok(Self::RankFusion),
            other => Err(Error::InvalidParameter(format!("unknown similarity basis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub conference: ConferenceId,
    pub score: f64,
    /// Union size on the chosen basis; the first tie-breaker.
    pub union_size: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatedOptions {
    /// Candidates whose set on the basis is smaller are skipped.
    pub min_profile_size: usize,
}

fn basis_set(p: &ConferenceProfile, basis: SimilarityBasis) -> BTreeSet<&str> {
    match basis {
        SimilarityBasis::Keywords => p.keywords.iter().map(String::as_str).collect(),
        _ => p.authors.iter().map(AuthorId::as_str).collect(),
    }
}

fn rank_all(
    target: &ConferenceProfile,
    profiles: &BTreeMap<ConferenceId, ConferenceProfile>,
    basis: SimilarityBasis,
    opts: RelatedOptions,
) -> Vec<Neighbor> {
    let t = basis_set(target, basis);
    let mut out: Vec<Neighbor> = profiles
        .values()
        .filter(|p| p.conference != target.conference)
        .filter_map(|p| {
            let s = basis_set(p, basis);
            (s.len() >= opts.min_profile_size).then(|| Neighbor {
                conference: p.conference.clone(),
                score: jaccard(&t, &s),
                union_size: union_size(&t, &s),
            })
        })
        .collect();
    sort_neighbors(&mut out);
    out
}

fn sort_neighbors(v: &mut [Neighbor]) {
    v.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(b.union_size.cmp(&a.union_size))
            .then_with(|| a.conference.cmp(&b.conference))
    });
}

/// The `k` conferences most similar to `target`, best first.
///
/// Ties on score go to the larger union, then to the smaller id.
pub fn related_conferences(
    target: &ConferenceId,
    profiles: &BTreeMap<ConferenceId, ConferenceProfile>,
    k: usize,
    basis: SimilarityBasis,
    opts: RelatedOptions,
) -> Result<Vec<Neighbor>> {
    let tp = profiles
        .get(target)
        .ok_or_else(|| Error::UnknownConference(target.clone()))?;
    let mut ranked = match basis {
        SimilarityBasis::Authors | SimilarityBasis::Keywords => rank_all(tp, profiles, basis, opts),
        SimilarityBasis::RankFusion => {
            let by_a = rank_all(tp, profiles, SimilarityBasis::Authors, opts);
            let by_k = rank_all(tp, profiles, SimilarityBasis::Keywords, opts);
            let mut fused: BTreeMap<ConferenceId, (f64, usize)> = BTreeMap::new();
            for list in [&by_a, &by_k] {
                for (rank, n) in list.iter().enumerate() {
                    let e = fused.entry(n.conference.clone()).or_insert((0.0, 0));
                    e.0 += 0.5 / (rank + 1) as f64;
                    e.1 += n.union_size;
                }
            }
            let mut v: Vec<Neighbor> = fused
                .into_iter()
                .map(|(conference, (score, union_size))| Neighbor {
                    conference,
                    score,
                    union_size,
                })
                .collect();
            sort_neighbors(&mut v);
            v
        }
    };
    ranked.truncate(k);
    Ok(ranked)
}

/// Writes `target, neighbor, basis, score, rank` rows (rank is 1-based).
pub fn write_related_report<W: Write>(
    mut out: W,
    target: &ConferenceId,
    basis: SimilarityBasis,
    neighbors: &[Neighbor],
) -> std::io::Result<()> {
    writeln!(out, "target\tneighbor\tbasis\tscore\trank")?;
    for (i, n) in neighbors.iter().enumerate() {
        writeln!(out, "{target}\t{}\t{basis}\t{:?}\t{}", n.conference, n.score, i + 1)?;
    }
    Ok(())
}
