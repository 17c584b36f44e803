//! Seeded generator of small academic corpora with known structure.
//!
//! Affiliations carry a persistent log-strength, a linear log-trend and an
//! affinity to one of two conference clusters. Each conference-year draws
//! its papers' lead affiliations in proportion to the resulting weights, so
//! relevance series are noisy but predictable from their own history.
//! Authors come from per-(affiliation, cluster) pools and keywords from
//! per-cluster vocabularies, so conferences in the same cluster look
//! similar to each other.

use std::ops::RangeInclusive;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{AffiliationId, AuthorId, ConferenceId, PaperId};
use crate::ingest::{AuthorshipLink, CitationEdge, KeywordRecord, PaperRecord, RawGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_conferences: usize,
    pub n_affiliations: usize,
    pub first_year: i32,
    pub n_years: usize,
    pub papers_per_year: usize,
    /// Spread of the persistent log-strength.
    pub strength_sd: f64,
    /// Spread of the per-year log-trend of trending affiliations.
    pub trend_sd: f64,
    /// Share of affiliations with a nonzero trend.
    pub trending_share: f64,
    /// Spread of the cluster and conference affinities.
    pub affinity_sd: f64,
    /// Year-to-year jitter of the log-weights.
    pub year_noise_sd: f64,
    pub authors_per_pool: usize,
    /// Mean number of coauthors beyond the lead author.
    pub mean_coauthors: f64,
    /// Chance that a coauthor comes from the lead author's affiliation.
    pub same_affiliation: f64,
    /// Chance that an author lists a second affiliation on a paper.
    pub second_affiliation: f64,
    pub full_research_share: f64,
    pub keywords_per_paper: usize,
    pub citations_per_paper: usize,
    /// Non-conference papers per year written by pool authors.
    pub other_papers_per_year: usize,
    /// Chance that a citation points outside the generated corpus.
    pub dangling_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_conferences: 6,
            n_affiliations: 200,
            first_year: 2001,
            n_years: 15,
            papers_per_year: 600,
            strength_sd: 1.2,
            trend_sd: 0.2,
            trending_share: 0.5,
            affinity_sd: 0.3,
            year_noise_sd: 0.05,
            authors_per_pool: 12,
            mean_coauthors: 2.0,
            same_affiliation: 0.75,
            second_affiliation: 0.05,
            full_research_share: 0.8,
            keywords_per_paper: 3,
            citations_per_paper: 4,
            other_papers_per_year: 30,
            dangling_rate: 0.02,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub raw: RawGraph,
    pub conferences: Vec<ConferenceId>,
    pub affiliations: Vec<AffiliationId>,
    pub years: RangeInclusive<i32>,
    /// Cluster of each conference, parallel to `conferences`.
    pub clusters: Vec<usize>,
    latent: Latent,
}

#[derive(Debug, Clone)]
struct Latent {
    strength: Vec<f64>,
    trend: Vec<f64>,
    cluster_affinity: Vec<Vec<f64>>,
    conf_affinity: Vec<Vec<f64>>,
    mid: f64,
}

impl SyntheticCorpus {
    /// Log of the lead-author sampling weight of affiliation `aff` at
    /// conference `conf` in `year`, before the yearly jitter.
    pub fn expected_log_weight(&self, conf: usize, aff: usize, year: i32) -> f64 {
        let l = &self.latent;
        l.strength[aff]
            + l.cluster_affinity[self.clusters[conf]][aff]
            + l.conf_affinity[conf][aff]
            + l.trend[aff] * (year as f64 - l.mid)
    }
}

const N_CLUSTERS: usize = 2;
const CLUSTER_VOCAB: usize = 30;
const CONFERENCE_VOCAB: usize = 10;

pub fn conference_id(i: usize) -> ConferenceId {
    ConferenceId::new(format!("C{i}"))
}

pub fn affiliation_id(i: usize) -> AffiliationId {
    AffiliationId::new(format!("aff{i:03}"))
}

fn author_id(aff: usize, cluster: usize, j: usize) -> AuthorId {
    AuthorId::new(format!("au{aff:03}-{cluster}-{j:02}"))
}

pub fn generate(cfg: &SynthConfig) -> Result<SyntheticCorpus> {
    if cfg.n_conferences == 0 || cfg.n_affiliations == 0 || cfg.n_years == 0 || cfg.authors_per_pool == 0 {
        return Err(Error::InvalidParameter("synthetic corpus needs conferences, affiliations, years and authors".into()));
    }
    let probs = [
        cfg.same_affiliation,
        cfg.second_affiliation,
        cfg.full_research_share,
        cfg.dangling_rate,
        cfg.trending_share,
    ];
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidParameter("synthetic corpus probabilities must lie in [0, 1]".into()));
    }
    let normal = |sd: f64| Normal::new(0.0, sd).map_err(|e| Error::InvalidParameter(e.to_string()));
    let strength_d = normal(cfg.strength_sd)?;
    let trend_d = normal(cfg.trend_sd)?;
    let affinity_d = normal(cfg.affinity_sd)?;
    let conf_affinity_d = normal(cfg.affinity_sd / 3.0)?;
    let jitter_d = normal(cfg.year_noise_sd)?;
    let coauthors_d = if cfg.mean_coauthors > 0.0 {
        Some(Poisson::new(cfg.mean_coauthors).map_err(|e| Error::InvalidParameter(e.to_string()))?)
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_aff = cfg.n_affiliations;
    let strength: Vec<f64> = (0..n_aff).map(|_| strength_d.sample(&mut rng)).collect();
    let trend: Vec<f64> = (0..n_aff)
        .map(|_| {
            let t = trend_d.sample(&mut rng);
            if rng.random_bool(cfg.trending_share) {
                t
            } else {
                0.0
            }
        })
        .collect();
    let cluster_affinity: Vec<Vec<f64>> = (0..N_CLUSTERS)
        .map(|_| (0..n_aff).map(|_| affinity_d.sample(&mut rng)).collect())
        .collect();
    let clusters: Vec<usize> = (0..cfg.n_conferences).map(|c| c * N_CLUSTERS / cfg.n_conferences).collect();
    let conf_affinity: Vec<Vec<f64>> = (0..cfg.n_conferences)
        .map(|_| (0..n_aff).map(|_| conf_affinity_d.sample(&mut rng)).collect())
        .collect();

    let conferences: Vec<ConferenceId> = (0..cfg.n_conferences).map(conference_id).collect();
    let affiliations: Vec<AffiliationId> = (0..n_aff).map(affiliation_id).collect();
    let last_year = cfg.first_year + cfg.n_years as i32 - 1;
    let mid = (cfg.first_year + last_year) as f64 / 2.0;

    let mut raw = RawGraph::default();
    let mut earlier: Vec<PaperId> = Vec::new();
    let mut next_paper = 0usize;
    let mut next_external = 0usize;

    for year in cfg.first_year..=last_year {
        let mut this_year: Vec<PaperId> = Vec::new();
        let t = year as f64 - mid;
        for (c, conf) in conferences.iter().enumerate() {
            let cl = clusters[c];
            let weights: Vec<f64> = (0..n_aff)
                .map(|a| {
                    let log_w = strength[a]
                        + cluster_affinity[cl][a]
                        + conf_affinity[c][a]
                        + trend[a] * t
                        + jitter_d.sample(&mut rng);
                    log_w.exp()
                })
                .collect();
            let pick = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            for _ in 0..cfg.papers_per_year {
                let id = PaperId::new(format!("P{next_paper:06}"));
                next_paper += 1;
                let lead = pick.sample(&mut rng);
                let extra = coauthors_d.as_ref().map_or(0, |d| d.sample(&mut rng) as usize);
                let mut team = vec![lead];
                for _ in 0..extra {
                    team.push(if rng.random_bool(cfg.same_affiliation) {
                        lead
                    } else {
                        pick.sample(&mut rng)
                    });
                }
                push_authors(&mut raw, &mut rng, cfg, &id, &team, cl);
                raw.papers.push(PaperRecord {
                    paper_id: id.clone(),
                    year,
                    conference: Some(conf.clone()),
                    is_full_research: rng.random_bool(cfg.full_research_share),
                });
                let mut words: Vec<String> = Vec::new();
                for _ in 0..cfg.keywords_per_paper {
                    let w = if rng.random_bool(0.7) {
                        format!("topic {cl}-{}", rng.random_range(0..CLUSTER_VOCAB))
                    } else {
                        format!("niche {c}-{}", rng.random_range(0..CONFERENCE_VOCAB))
                    };
                    if !words.contains(&w) {
                        words.push(w);
                    }
                }
                raw.keywords
                    .extend(words.iter().map(|w| KeywordRecord::new(id.clone(), w)));
                cite(&mut raw, &mut rng, cfg, &id, &earlier, &mut next_external);
                this_year.push(id);
            }
        }
        // Venue-less papers by the same author pools.
        let uniform: Vec<f64> = strength.iter().map(|s| s.exp()).collect();
        let pick = WeightedIndex::new(&uniform).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for _ in 0..cfg.other_papers_per_year {
            let id = PaperId::new(format!("P{next_paper:06}"));
            next_paper += 1;
            let team = vec![pick.sample(&mut rng), pick.sample(&mut rng)];
            let cl = rng.random_range(0..N_CLUSTERS);
            push_authors(&mut raw, &mut rng, cfg, &id, &team, cl);
            raw.papers.push(PaperRecord {
                paper_id: id.clone(),
                year,
                conference: None,
                is_full_research: false,
            });
            cite(&mut raw, &mut rng, cfg, &id, &earlier, &mut next_external);
            this_year.push(id);
        }
        earlier.extend(this_year);
    }

    Ok(SyntheticCorpus {
        raw,
        conferences,
        affiliations,
        years: cfg.first_year..=last_year,
        clusters,
        latent: Latent {
            strength,
            trend,
            cluster_affinity,
            conf_affinity,
            mid,
        },
    })
}

fn push_authors(raw: &mut RawGraph, rng: &mut ChaCha8Rng, cfg: &SynthConfig, paper: &PaperId, team: &[usize], cluster: usize) {
    let mut seen: Vec<AuthorId> = Vec::new();
    for &aff in team {
        let author = author_id(aff, cluster, rng.random_range(0..cfg.authors_per_pool));
        if seen.contains(&author) {
            continue;
        }
        seen.push(author.clone());
        let sequence = seen.len() as u32;
        raw.authorships.push(AuthorshipLink {
            paper_id: paper.clone(),
            author_id: author.clone(),
            affiliation_id: Some(affiliation_id(aff)),
            author_sequence: sequence,
        });
        if rng.random_bool(cfg.second_affiliation) {
            let other = rng.random_range(0..cfg.n_affiliations);
            if other != aff {
                raw.authorships.push(AuthorshipLink {
                    paper_id: paper.clone(),
                    author_id: author,
                    affiliation_id: Some(affiliation_id(other)),
                    author_sequence: sequence,
                });
            }
        }
    }
}

fn cite(
    raw: &mut RawGraph,
    rng: &mut ChaCha8Rng,
    cfg: &SynthConfig,
    paper: &PaperId,
    earlier: &[PaperId],
    next_external: &mut usize,
) {
    for _ in 0..cfg.citations_per_paper {
        let cited = if rng.random_bool(cfg.dangling_rate) || earlier.is_empty() {
            *next_external += 1;
            PaperId::new(format!("X{:06}", *next_external))
        } else {
            earlier[rng.random_range(0..earlier.len())].clone()
        };
        raw.citations.push(CitationEdge {
            citing: paper.clone(),
            cited,
        });
    }
}
