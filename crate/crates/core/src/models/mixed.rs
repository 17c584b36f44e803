//! Linear model with one random intercept per (conference, affiliation) group.
//!
//! y = Xβ + u_g + ε with u_g ~ N(0, σ²_u) and ε ~ N(0, σ²_e), fit by maximum
//! likelihood with EM. Every quantity the iteration needs reduces to per-group
//! sufficient statistics (XᵀX, Xᵀ1, Xᵀy, Σy, Σy², n), so one iteration costs
//! O(G·p²) regardless of the row count.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, RowKey};

pub const INTERCEPT: &str = "(intercept)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MixedConfig {
    pub max_iter: usize,
    /// Convergence threshold on the largest parameter change, relative to
    /// max(1, |parameter|).
    pub tol: f64,
    /// Hold σ²_group at this value instead of estimating it.
    pub fix_group_variance: Option<f64>,
}

impl Default for MixedConfig {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-8,
            fix_group_variance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminatedEffect {
    pub name: String,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedModel {
    /// Fixed-effect names in design order, starting with the intercept.
    pub fixed_names: Vec<String>,
    pub fixed_coefficients: BTreeMap<String, f64>,
    pub standard_errors: BTreeMap<String, f64>,
    /// Two-sided Wald p-values.
    pub p_values: BTreeMap<String, f64>,
    pub random_intercepts: BTreeMap<String, f64>,
    pub sigma2_residual: f64,
    pub sigma2_group: f64,
    pub log_likelihood: f64,
    pub iterations: usize,
    /// True once the fit reached its stopping rule.
    pub fitted: bool,
    /// σ²_group was set to zero by the boundary check rather than by EM.
    pub boundary: bool,
    /// Input columns dropped because they were constant.
    pub dropped_constant: Vec<String>,
    /// Effects removed by backward elimination, in removal order.
    pub eliminated: Vec<EliminatedEffect>,
}

/// Group label used for (conference, affiliation) random intercepts.
pub fn group_label(key: &RowKey) -> String {
    format!("{}|{}", key.conference, key.affiliation)
}

pub fn group_labels(x: &FeatureMatrix) -> Vec<String> {
    x.keys().iter().map(group_label).collect()
}

struct GroupStats {
    label: String,
    n: f64,
    xtx: DMatrix<f64>,
    xt1: DVector<f64>,
    xty: DVector<f64>,
    sum_y: f64,
    sum_y2: f64,
}

struct Design {
    names: Vec<String>,
    groups: Vec<GroupStats>,
    n_rows: usize,
}

impl Design {
    fn p(&self) -> usize {
        self.names.len()
    }
}

struct State {
    beta: DVector<f64>,
    s2e: f64,
    s2u: f64,
}

pub fn mixed_fit(x: &FeatureMatrix, groups: &[String], config: &MixedConfig) -> Result<MixedModel> {
    let all: Vec<usize> = (0..x.n_cols()).collect();
    fit_columns(x, groups, config, &all)
}

fn fit_columns(x: &FeatureMatrix, groups: &[String], config: &MixedConfig, cols: &[usize]) -> Result<MixedModel> {
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance {} must be positive", config.tol)));
    }
    if let Some(v) = config.fix_group_variance {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("fixed group variance {v} must be finite and >= 0")));
        }
    }
    let y = x.targets().ok_or(Error::EmptyInput("mixed model needs training targets"))?;
    if groups.len() != x.n_rows() {
        return Err(Error::LengthMismatch {
            expected: x.n_rows(),
            actual: groups.len(),
        });
    }
    let (design, dropped_constant) = build_design(x, y, groups, cols)?;
    if design.groups.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "mixed model needs at least 2 groups, got {}",
            design.groups.len()
        )));
    }
    if design.n_rows <= design.p() {
        return Err(Error::InvalidParameter(format!(
            "{} rows cannot identify {} fixed effects plus a residual variance",
            design.n_rows,
            design.p()
        )));
    }

    let (state, iterations, boundary) = estimate(&design, config)?;
    Ok(finish(design, state, iterations, boundary, dropped_constant))
}

fn build_design(x: &FeatureMatrix, y: &[f64], groups: &[String], cols: &[usize]) -> Result<(Design, Vec<String>)> {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for &c in cols {
        let first = if x.n_rows() > 0 { x.value(0, c) } else { 0.0 };
        if (0..x.n_rows()).all(|r| x.value(r, c) == first) {
            dropped.push(x.columns()[c].clone());
        } else {
            kept.push(c);
        }
    }
    let mut names = vec![INTERCEPT.to_string()];
    names.extend(kept.iter().map(|&c| x.columns()[c].clone()));
    check_rank(x, &kept, &names)?;

    let p = names.len();
    let mut by_label: BTreeMap<&str, GroupStats> = BTreeMap::new();
    let mut xi = DVector::zeros(p);
    for (r, label) in groups.iter().enumerate() {
        xi[0] = 1.0;
        for (j, &c) in kept.iter().enumerate() {
            xi[j + 1] = x.value(r, c);
        }
        let g = by_label.entry(label.as_str()).or_insert_with(|| GroupStats {
            label: label.clone(),
            n: 0.0,
            xtx: DMatrix::zeros(p, p),
            xt1: DVector::zeros(p),
            xty: DVector::zeros(p),
            sum_y: 0.0,
            sum_y2: 0.0,
        });
        g.n += 1.0;
        g.xtx.ger(1.0, &xi, &xi, 1.0);
        g.xt1 += &xi;
        g.xty.axpy(y[r], &xi, 1.0);
        g.sum_y += y[r];
        g.sum_y2 += y[r] * y[r];
    }
    Ok((
        Design {
            names,
            groups: by_label.into_values().collect(),
            n_rows: x.n_rows(),
        },
        dropped,
    ))
}

/// Modified Gram-Schmidt over the intercept and kept columns; a column whose
/// residual norm collapses relative to its own norm is collinear with the
/// columns before it.
fn check_rank(x: &FeatureMatrix, kept: &[usize], names: &[String]) -> Result<()> {
    let n = x.n_rows();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut collinear = Vec::new();
    let columns = std::iter::once(vec![1.0; n]).chain(kept.iter().map(|&c| x.column(c)));
    for (j, mut v) in columns.enumerate() {
        let norm0 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        for q in &basis {
            let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= d * qi;
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm0 == 0.0 || norm <= 1e-9 * norm0 {
            collinear.push(names[j].clone());
        } else {
            basis.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    if collinear.is_empty() {
        Ok(())
    } else {
        Err(Error::RankDeficient(collinear))
    }
}

/// Weight γ_g = σ²_u / (σ²_e + n_g σ²_u) appearing in V_g⁻¹ = (I − γ_g 11ᵀ)/σ²_e.
fn gamma(g: &GroupStats, s2e: f64, s2u: f64) -> f64 {
    if s2u == 0.0 {
        0.0
    } else {
        s2u / (s2e + g.n * s2u)
    }
}

fn gls_system(design: &Design, s2e: f64, s2u: f64) -> (DMatrix<f64>, DVector<f64>) {
    let p = design.p();
    let mut m = DMatrix::zeros(p, p);
    let mut b = DVector::zeros(p);
    for g in &design.groups {
        let w = gamma(g, s2e, s2u);
        m += &g.xtx;
        b += &g.xty;
        if w != 0.0 {
            m.ger(-w, &g.xt1, &g.xt1, 1.0);
            b.axpy(-w * g.sum_y, &g.xt1, 1.0);
        }
    }
    (m, b)
}

fn solve_spd(m: &DMatrix<f64>, b: &DVector<f64>, names: &[String]) -> Result<DVector<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Ok(ch.solve(b));
    }
    m.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::RankDeficient(names.to_vec()))
}

/// (Σr², Σr) for a group's residuals r = y − Xβ.
fn residual_moments(g: &GroupStats, beta: &DVector<f64>) -> (f64, f64) {
    let ss = g.sum_y2 - 2.0 * beta.dot(&g.xty) + (&g.xtx * beta).dot(beta);
    let sum = g.sum_y - beta.dot(&g.xt1);
    (ss.max(0.0), sum)
}

fn log_likelihood(design: &Design, st: &State) -> f64 {
    let mut ll = design.n_rows as f64 * (2.0 * std::f64::consts::PI).ln();
    for g in &design.groups {
        let (ss, sum) = residual_moments(g, &st.beta);
        let w = gamma(g, st.s2e, st.s2u);
        ll += (g.n - 1.0) * st.s2e.ln() + (st.s2e + g.n * st.s2u).ln();
        ll += (ss - w * sum * sum) / st.s2e;
    }
    -0.5 * ll
}

/// Log-likelihood with σ²_e profiled out at variance ratio λ = σ²_u / σ²_e.
fn profile(design: &Design, lambda: f64) -> Result<(f64, State)> {
    let n = design.n_rows as f64;
    let (m, b) = gls_system(design, 1.0, lambda);
    let beta = solve_spd(&m, &b, &design.names)?;
    let mut quad = 0.0;
    let mut logdet = 0.0;
    for g in &design.groups {
        let (ss, sum) = residual_moments(g, &beta);
        quad += ss - gamma(g, 1.0, lambda) * sum * sum;
        logdet += (1.0 + g.n * lambda).ln();
    }
    let s2e = (quad / n).max(f64::MIN_POSITIVE);
    let ll = -0.5 * (n * (2.0 * std::f64::consts::PI * s2e).ln() + logdet + n);
    Ok((ll, State { beta, s2e, s2u: lambda * s2e }))
}

/// EM starting point: the profile-likelihood maximizer over log λ, located
/// on a coarse grid and refined by golden-section search. EM is linear and
/// crawls on flat likelihoods when started far away.
fn profile_start(design: &Design) -> Result<State> {
    const LO: f64 = -18.0;
    const HI: f64 = 18.0;
    const STEPS: usize = 72;
    let at = |t: f64| profile(design, t.exp());
    let step = (HI - LO) / STEPS as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..=STEPS {
        let ll = at(LO + step * i as f64)?.0;
        if ll > best.1 {
            best = (i, ll);
        }
    }
    let centre = LO + step * best.0 as f64;
    let (mut a, mut b) = (centre - step, centre + step);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (at(c)?.0, at(d)?.0);
    while b - a > 1e-10 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = at(c)?.0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = at(d)?.0;
        }
    }
    Ok(at(0.5 * (a + b))?.1)
}

fn estimate(design: &Design, config: &MixedConfig) -> Result<(State, usize, bool)> {
    let n = design.n_rows as f64;
    let (m, b) = gls_system(design, 1.0, 0.0);
    let beta_ols = solve_spd(&m, &b, &design.names)?;
    let moments: Vec<(f64, f64)> = design.groups.iter().map(|g| residual_moments(g, &beta_ols)).collect();
    let rss: f64 = moments.iter().map(|m| m.0).sum();
    let s2e_ols = rss / n;
    if s2e_ols <= 0.0 {
        // Perfect fit: no residual variance to split between the components.
        return Ok((
            State {
                beta: beta_ols,
                s2e: 0.0,
                s2u: 0.0,
            },
            0,
            true,
        ));
    }

    let fixed = config.fix_group_variance;
    let mut st = match fixed {
        Some(v) => State {
            beta: beta_ols,
            s2e: s2e_ols,
            s2u: v,
        },
        None => {
            // Score for σ²_u at the boundary: ½ Σ_g (r_g·² / σ⁴_e − n_g / σ²_e).
            let score: f64 = design
                .groups
                .iter()
                .zip(&moments)
                .map(|(g, &(_, sum))| sum * sum / (s2e_ols * s2e_ols) - g.n / s2e_ols)
                .sum();
            if score <= 0.0 {
                return Ok((
                    State {
                        beta: beta_ols,
                        s2e: s2e_ols,
                        s2u: 0.0,
                    },
                    0,
                    true,
                ));
            }
            profile_start(design)?
        }
    };

    let mut trace = Vec::new();
    for iter in 1..=config.max_iter {
        let (m, b) = gls_system(design, st.s2e, st.s2u);
        let beta = solve_spd(&m, &b, &design.names)?;
        let mut u2 = 0.0;
        let mut e2 = 0.0;
        for g in &design.groups {
            let (ss, sum) = residual_moments(g, &beta);
            let w = gamma(g, st.s2e, st.s2u);
            let u = w * sum;
            let v = st.s2u * st.s2e / (st.s2e + g.n * st.s2u);
            u2 += u * u + v;
            e2 += ss - 2.0 * u * sum + g.n * u * u + g.n * v;
        }
        let s2e = (e2 / n).max(f64::MIN_POSITIVE);
        let s2u = match fixed {
            Some(v) => v,
            None => u2 / design.groups.len() as f64,
        };
        let rel = |new: f64, old: f64| (new - old).abs() / new.abs().max(1.0);
        let mut change = rel(s2e, st.s2e).max(rel(s2u, st.s2u));
        for (new, old) in beta.iter().zip(st.beta.iter()) {
            change = change.max(rel(*new, *old));
        }
        st = State { beta, s2e, s2u };
        trace.push(change);
        if change < config.tol {
            return Ok((st, iter, false));
        }
    }
    let keep = trace.len().saturating_sub(10);
    Err(Error::NonConvergence {
        iterations: config.max_iter,
        trace: trace.split_off(keep),
    })
}

fn finish(design: Design, st: State, iterations: usize, boundary: bool, dropped_constant: Vec<String>) -> MixedModel {
    let (m, _) = gls_system(&design, st.s2e, st.s2u);
    let cov = m
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .or_else(|| m.clone().try_inverse())
        .unwrap_or_else(|| DMatrix::from_element(design.p(), design.p(), f64::NAN))
        * st.s2e;
    let normal = |z: f64| statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2);

    let mut fixed_coefficients = BTreeMap::new();
    let mut standard_errors = BTreeMap::new();
    let mut p_values = BTreeMap::new();
    for (j, name) in design.names.iter().enumerate() {
        let est = st.beta[j];
        let se = cov[(j, j)].max(0.0).sqrt();
        let p = if se > 0.0 {
            normal(est / se)
        } else if est == 0.0 {
            1.0
        } else {
            0.0
        };
        fixed_coefficients.insert(name.clone(), est);
        standard_errors.insert(name.clone(), se);
        p_values.insert(name.clone(), p);
    }
    let random_intercepts = design
        .groups
        .iter()
        .map(|g| {
            let (_, sum) = residual_moments(g, &st.beta);
            (g.label.clone(), gamma(g, st.s2e, st.s2u) * sum)
        })
        .collect();
    let log_likelihood = if st.s2e > 0.0 {
        log_likelihood(&design, &st)
    } else {
        f64::INFINITY
    };
    MixedModel {
        fixed_names: design.names,
        fixed_coefficients,
        standard_errors,
        p_values,
        random_intercepts,
        sigma2_residual: st.s2e,
        sigma2_group: st.s2u,
        log_likelihood,
        iterations,
        fitted: true,
        boundary,
        dropped_constant,
        eliminated: Vec::new(),
    }
}

/// Repeatedly drop the non-intercept effect with the largest p-value above
/// `level` and refit, until every remaining effect is significant or only
/// one is left.
pub fn backward_eliminate(x: &FeatureMatrix, groups: &[String], config: &MixedConfig, level: f64) -> Result<MixedModel> {
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::InvalidParameter(format!("significance level {level} outside [0, 1]")));
    }
    let mut cols: Vec<usize> = (0..x.n_cols()).collect();
    let mut eliminated = Vec::new();
    loop {
        let mut model = fit_columns(x, groups, config, &cols)?;
        let effects = model.effect_names();
        let worst = effects
            .iter()
            .map(|name| (name, model.p_values[*name]))
            .filter(|&(_, p)| p > level)
            .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(a.0)));
        match worst {
            Some((name, p)) if effects.len() > 1 => {
                let name = (*name).to_string();
                cols.retain(|&c| x.columns()[c] != name);
                eliminated.push(EliminatedEffect { name, p_value: p });
            }
            _ => {
                model.eliminated = eliminated;
                return Ok(model);
            }
        }
    }
}

impl MixedModel {
    /// Fixed effects other than the intercept.
    pub fn effect_names(&self) -> Vec<&str> {
        self.fixed_names.iter().skip(1).map(String::as_str).collect()
    }

    /// Effects with p-value at or below `level`.
    pub fn significant(&self, level: f64) -> Vec<&str> {
        self.effect_names()
            .into_iter()
            .filter(|n| self.p_values[*n] <= level)
            .collect()
    }

    /// Fitted values for the rows of `x`: fixed part plus the random
    /// intercept of each row's group (zero for groups unseen in training).
    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        let labels = group_labels(x);
        self.predict_with_groups(x, &labels)
    }

    pub fn predict_with_groups(&self, x: &FeatureMatrix, groups: &[String]) -> Result<Vec<f64>> {
        if groups.len() != x.n_rows() {
            return Err(Error::LengthMismatch {
                expected: x.n_rows(),
                actual: groups.len(),
            });
        }
        let terms: Vec<(usize, f64)> = self
            .effect_names()
            .into_iter()
            .map(|name| {
                let c = x.column_index(name).ok_or_else(|| Error::MissingColumn(name.to_string()))?;
                Ok((c, self.fixed_coefficients[name]))
            })
            .collect::<Result<_>>()?;
        let intercept = self.fixed_coefficients[INTERCEPT];
        Ok((0..x.n_rows())
            .map(|r| {
                let row = x.row(r);
                let fixed: f64 = intercept + terms.iter().map(|&(c, b)| b * row[c]).sum::<f64>();
                fixed + self.random_intercepts.get(&groups[r]).copied().unwrap_or(0.0)
            })
            .collect())
    }
}
