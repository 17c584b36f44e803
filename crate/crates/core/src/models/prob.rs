use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::AffiliationId;

/// Share of recent accepted papers per affiliation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbModel {
    pub scores: BTreeMap<AffiliationId, f64>,
    /// Inclusive year range the counts cover.
    pub window: (i32, i32),
}

pub fn prob_fit(counts: &BTreeMap<AffiliationId, u64>, window: (i32, i32)) -> Result<ProbModel> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::EmptyInput("probabilities model needs a nonzero paper count"));
    }
    let scores = counts
        .iter()
        .map(|(a, &c)| (a.clone(), c as f64 / total as f64))
        .collect();
    Ok(ProbModel { scores, window })
}

impl ProbModel {
    /// Affiliations by descending probability, ties by id.
    pub fn ranking(&self) -> Vec<(AffiliationId, f64)> {
        let mut v: Vec<_> = self.scores.iter().map(|(a, &s)| (a.clone(), s)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v
    }

    pub fn score(&self, aff: &AffiliationId) -> f64 {
        self.scores.get(aff).copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(items: &[(&str, u64)]) -> BTreeMap<AffiliationId, u64> {
        items.iter().map(|&(a, c)| (a.into(), c)).collect()
    }

    #[test]
    fn proportions() {
        let m = prob_fit(&counts(&[("A", 3), ("B", 1)]), (2011, 2015)).unwrap();
        assert_eq!(m.score(&"A".into()), 0.75);
        assert_eq!(m.score(&"B".into()), 0.25);
        assert_eq!(m.ranking()[0].0.as_str(), "A");
    }

    #[test]
    fn singleton_and_ties() {
        let m = prob_fit(&counts(&[("A", 1)]), (2011, 2015)).unwrap();
        assert_eq!(m.score(&"A".into()), 1.0);
        let t = prob_fit(&counts(&[("B", 2), ("A", 2)]), (2011, 2015)).unwrap();
        let r = t.ranking();
        assert_eq!(r[0].1, r[1].1);
        assert_eq!(r[0].0.as_str(), "A");
    }

    #[test]
    fn all_zero_is_an_error() {
        assert!(prob_fit(&counts(&[("A", 0)]), (2011, 2015)).is_err());
        assert!(prob_fit(&counts(&[]), (2011, 2015)).is_err());
    }
}
