use std::collections::BTreeMap;

use affrank::features::{FeatureMatrix, RowKey};
use affrank::models::{
    backward_eliminate, gbdt_fit, load_model, mixed_fit, prob_fit, save_model, GbdtConfig, MixedConfig, Model,
};
use affrank::AffiliationId;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn random_matrix(seed: u64, rows: usize, cols: usize) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect();
    let y = data
        .iter()
        .map(|r| r[0].sin() * 3.0 + r.iter().sum::<f64>() + rng.random_range(-1.0..1.0))
        .collect();
    let names: Vec<String> = (0..cols).map(|j| format!("x{j}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    FeatureMatrix::from_rows(&names, &data, Some(y)).unwrap()
}

/// Rows keyed by `groups` distinct affiliations, with a random intercept per
/// group and two slopes.
fn grouped(seed: u64, groups: usize, per_group: usize) -> (FeatureMatrix, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut keys = Vec::new();
    let mut values = Vec::new();
    let mut y = Vec::new();
    let mut labels = Vec::new();
    for g in 0..groups {
        let u = rng.random_range(-2.0..2.0);
        for i in 0..per_group {
            let (a, b): (f64, f64) = (rng.random_range(0.0..10.0), rng.random_range(-3.0..3.0));
            values.extend([a, b]);
            y.push(1.0 + 0.5 * a - 0.2 * b + u + noise.sample(&mut rng));
            keys.push(RowKey {
                conference: "C".into(),
                affiliation: format!("g{g}").into(),
                year: 2000 + i as i32,
            });
            labels.push(format!("C|g{g}"));
        }
    }
    let m = FeatureMatrix::new(vec!["a".into(), "b".into()], keys, values, Some(y)).unwrap();
    (m, labels)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn boosting_never_raises_training_loss(
        seed in any::<u64>(),
        rows in 10usize..80,
        cols in 1usize..4,
        depth in 1usize..5,
        lr in 0.01f64..1.0,
        leaf in 1usize..6,
    ) {
        let x = random_matrix(seed, rows, cols);
        let cfg = GbdtConfig { n_trees: 25, max_depth: depth, learning_rate: lr, min_samples_leaf: leaf, ..Default::default() };
        let m = gbdt_fit(&x, &cfg).unwrap();
        prop_assert_eq!(m.training_loss.len(), 26);
        for w in m.training_loss.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{:?}", m.training_loss);
        }
        prop_assert!(m.predict(&x).unwrap().iter().all(|p| p.is_finite()));
        let imp = m.feature_importance();
        if !imp.is_empty() {
            prop_assert!(imp.values().all(|&v| v >= 0.0));
            prop_assert!((imp.values().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn prob_ranking_ignores_count_scale(counts in prop::collection::btree_map(0u8..30, 1u64..50, 1..20), k in 2u64..10) {
        let c: BTreeMap<AffiliationId, u64> = counts.iter().map(|(a, &n)| (format!("a{a}").into(), n)).collect();
        let scaled: BTreeMap<AffiliationId, u64> = c.iter().map(|(a, &n)| (a.clone(), n * k)).collect();
        let (m, s) = (prob_fit(&c, (2011, 2015)).unwrap(), prob_fit(&scaled, (2011, 2015)).unwrap());
        let names = |r: Vec<(AffiliationId, f64)>| r.into_iter().map(|e| e.0).collect::<Vec<_>>();
        prop_assert_eq!(names(m.ranking()), names(s.ranking()));
        for (a, v) in &m.scores {
            prop_assert!((v - s.scores[a]).abs() < 1e-12);
        }
    }

    #[test]
    fn variance_components_are_nonnegative(seed in any::<u64>(), groups in 3usize..12, per in 3usize..10) {
        let (x, labels) = grouped(seed, groups, per);
        let m = mixed_fit(&x, &labels, &MixedConfig::default()).unwrap();
        prop_assert!(m.fitted);
        prop_assert!(m.sigma2_residual > 0.0);
        prop_assert!(m.sigma2_group >= 0.0);
        prop_assert!(m.p_values.values().all(|p| (0.0..=1.0).contains(p)));
        prop_assert!(m.predict(&x).unwrap().iter().all(|p| p.is_finite()));
    }

    #[test]
    fn elimination_at_level_one_keeps_everything(seed in any::<u64>()) {
        let (x, labels) = grouped(seed, 6, 6);
        let m = backward_eliminate(&x, &labels, &MixedConfig::default(), 1.0).unwrap();
        prop_assert!(m.eliminated.is_empty());
        prop_assert_eq!(m.effect_names(), vec!["a", "b"]);
    }
}

#[test]
fn additive_target_credits_both_features() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rows: Vec<Vec<f64>> = (0..200).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
    let y = rows.iter().map(|r| 2.0 * r[0] + (3.0 * r[1]).sin()).collect();
    let x = FeatureMatrix::from_rows(&["f", "g"], &rows, Some(y)).unwrap();
    let imp = gbdt_fit(&x, &GbdtConfig::default()).unwrap().feature_importance();
    assert!(imp["f"] > 0.0 && imp["g"] > 0.0);
    assert!((imp["f"] + imp["g"] - 1.0).abs() < 1e-12);
}

#[test]
fn saved_models_predict_identically() {
    let dir = tempfile::tempdir().unwrap();
    let x = random_matrix(3, 60, 3);
    let g = gbdt_fit(&x, &GbdtConfig { n_trees: 40, ..Default::default() }).unwrap();
    let path = dir.path().join("gbdt.json");
    save_model(&path, &Model::Gbdt(g.clone())).unwrap();
    let Model::Gbdt(back) = load_model(&path).unwrap() else { panic!("wrong family") };
    assert_eq!(back.predict(&x).unwrap(), g.predict(&x).unwrap());

    let (x, labels) = grouped(5, 8, 6);
    let m = mixed_fit(&x, &labels, &MixedConfig::default()).unwrap();
    let path = dir.path().join("mixed.json");
    save_model(&path, &Model::Mixed(m.clone())).unwrap();
    let Model::Mixed(back) = load_model(&path).unwrap() else { panic!("wrong family") };
    assert_eq!(back.predict(&x).unwrap(), m.predict(&x).unwrap());
}
