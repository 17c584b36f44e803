//! Screens features with a random-intercept linear model: fit, then
//! backward elimination until every remaining effect is significant.
//!
//! cargo run --release --example mixed_effects_screening -- [level]

use affrank::bench::{synthetic_panel, CompetitionSetup};
use affrank::features::{assemble, FeatureMatrix, FeatureSetSpec};
use affrank::models::{backward_eliminate, group_labels, mixed_fit, MixedConfig};

fn main() -> affrank::Result<()> {
    let level: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let (panel, _) = synthetic_panel(&CompetitionSetup::default())?;
    let main = panel.conferences()[0].clone();
    let spec = FeatureSetSpec {
        lag_windows: vec![2],
        stat_windows: vec![3],
        drift: true,
        ses_alphas: vec![0.5],
        ..Default::default()
    };
    let parts = (panel.first_year() + 3..=panel.last_year())
        .map(|t| assemble(&panel, &spec, std::slice::from_ref(&main), t, None))
        .collect::<affrank::Result<Vec<_>>>()?;
    // Medians and means of a short window duplicate lags; keep a full-rank set.
    let keep: Vec<String> = ["lag_1", "lag_2", "sw3_std", "sw3_max", "drift", "ses_0.50"].map(String::from).to_vec();
    let x = FeatureMatrix::vstack(&parts)?.select(&keep)?;
    let groups = group_labels(&x);
    println!("{} rows, {} groups (conference|affiliation)", x.n_rows(), groups.iter().collect::<std::collections::BTreeSet<_>>().len());

    let full = mixed_fit(&x, &groups, &MixedConfig::default())?;
    println!(
        "full model: sigma2 residual {:.4}, group {:.4}, loglik {:.2}, {} EM iterations{}",
        full.sigma2_residual,
        full.sigma2_group,
        full.log_likelihood,
        full.iterations,
        if full.boundary { " (boundary)" } else { "" }
    );
    for name in &full.fixed_names {
        println!(
            "  {name:<12} {:>9.4}  se {:.4}  p {:.3e}",
            full.fixed_coefficients[name], full.standard_errors[name], full.p_values[name]
        );
    }

    let reduced = backward_eliminate(&x, &groups, &MixedConfig::default(), level)?;
    println!("\nbackward elimination at {level}:");
    for e in &reduced.eliminated {
        println!("  dropped {:<12} p {:.3}", e.name, e.p_value);
    }
    println!("  kept {}", reduced.effect_names().join(", "));
    Ok(())
}
