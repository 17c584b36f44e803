use std::collections::{BTreeMap, BTreeSet};

use affrank::similarity::{jaccard, related_conferences, ConferenceProfile, RelatedOptions, SimilarityBasis};
use affrank::ConferenceId;
use proptest::prelude::*;

fn set() -> impl Strategy<Value = BTreeSet<u8>> {
    prop::collection::btree_set(0u8..40, 0..25)
}

fn profiles() -> impl Strategy<Value = BTreeMap<ConferenceId, ConferenceProfile>> {
    prop::collection::vec((prop::collection::btree_set(0u8..30, 0..15), prop::collection::btree_set(0u8..30, 0..15)), 2..8)
        .prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (a, k))| {
                    let conference = ConferenceId::new(format!("C{i}"));
                    let p = ConferenceProfile {
                        conference: conference.clone(),
                        authors: a.into_iter().map(|x| format!("au{x}").into()).collect(),
                        keywords: k.into_iter().map(|x| format!("kw{x}")).collect(),
                    };
                    (conference, p)
                })
                .collect()
        })
}

const BASES: [SimilarityBasis; 3] = [SimilarityBasis::Authors, SimilarityBasis::Keywords, SimilarityBasis::RankFusion];

proptest! {
    #[test]
    fn jaccard_is_symmetric_and_bounded(a in set(), b in set()) {
        let s = jaccard(&a, &b);
        prop_assert_eq!(s, jaccard(&b, &a));
        prop_assert!((0.0..=1.0).contains(&s));
    }

    #[test]
    fn jaccard_identity(a in set()) {
        prop_assume!(!a.is_empty());
        prop_assert_eq!(jaccard(&a, &a), 1.0);
    }

    #[test]
    fn shared_elements_never_lower_similarity(a in set(), b in set(), x in 40u8..60) {
        let (mut a2, mut b2) = (a.clone(), b.clone());
        a2.insert(x);
        b2.insert(x);
        prop_assert!(jaccard(&a2, &b2) >= jaccard(&a, &b));
    }

    #[test]
    fn related_lists_exclude_the_target_and_are_sorted(ps in profiles(), k in 0usize..10, b in 0usize..3) {
        let target = ConferenceId::new("C0");
        let basis = BASES[b];
        let out = related_conferences(&target, &ps, k, basis, RelatedOptions::default()).unwrap();
        prop_assert!(out.len() <= k.min(ps.len() - 1));
        prop_assert!(out.iter().all(|n| n.conference != target));
        prop_assert!(out.windows(2).all(|w| w[0].score >= w[1].score));
        let names: BTreeSet<_> = out.iter().map(|n| &n.conference).collect();
        prop_assert_eq!(names.len(), out.len());
        let again = related_conferences(&target, &ps, k, basis, RelatedOptions::default()).unwrap();
        prop_assert_eq!(out, again);
    }
}
