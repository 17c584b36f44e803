//! Least-squares gradient boosting over regression trees.
//!
//! Each tree is fit to the current residuals by exact greedy variance
//! reduction: candidate thresholds are midpoints between consecutive distinct
//! values of a feature. Trees grow level by level; per feature the rows are
//! kept sorted by value within each node, so one level costs a linear pass
//! per feature.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbdtConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Shrinkage applied to every tree, in (0, 1].
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    /// Share of features offered to each tree, in (0, 1].
    pub feature_fraction: f64,
    pub seed: u64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        Self {
            n_trees: 300,
            max_depth: 3,
            learning_rate: 0.1,
            min_samples_leaf: 5,
            feature_fraction: 1.0,
            seed: 0,
        }
    }
}

impl GbdtConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "learning rate {} outside (0, 1]",
                self.learning_rate
            )));
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "feature fraction {} outside (0, 1]",
                self.feature_fraction
            )));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::InvalidParameter("min_samples_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

/// Rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Squared-error reduction achieved on the training residuals.
        gain: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    fn visit_splits(&self, f: &mut impl FnMut(usize, f64)) {
        if let TreeNode::Split {
            feature,
            gain,
            left,
            right,
            ..
        } = self
        {
            f(*feature, *gain);
            left.visit_splits(f);
            right.visit_splits(f);
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub feature_names: Vec<String>,
    /// Mean of the training targets.
    pub base_prediction: f64,
    pub trees: Vec<TreeNode>,
    pub config: GbdtConfig,
    /// Training sum of squared errors after the base and after each tree.
    pub training_loss: Vec<f64>,
}

// Splits must beat this fraction of the node's residual sum of squares;
// anything smaller is rounding noise.
const RELATIVE_GAIN_FLOOR: f64 = 1e-12;

pub fn gbdt_fit(x: &FeatureMatrix, config: &GbdtConfig) -> Result<GbdtModel> {
    config.validate()?;
    let y = x
        .targets()
        .ok_or(Error::EmptyInput("boosting needs training targets"))?;
    let n = x.n_rows();
    if n == 0 {
        return Err(Error::EmptyInput("boosting needs at least one row"));
    }
    let n_features = x.n_cols();
    let columns: Vec<Vec<f64>> = (0..n_features).map(|f| x.column(f)).collect();
    let presorted: Vec<Vec<u32>> = columns
        .par_iter()
        .map(|col| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
            idx
        })
        .collect();

    let base = y.iter().sum::<f64>() / n as f64;
    let mut pred = vec![base; n];
    let loss = |pred: &[f64]| y.iter().zip(pred).map(|(t, p)| (t - p) * (t - p)).sum::<f64>();
    let mut training_loss = vec![loss(&pred)];
    let mut trees = Vec::with_capacity(config.n_trees);
    let all_features: Vec<usize> = (0..n_features).collect();

    for m in 0..config.n_trees {
        let residuals: Vec<f64> = y.iter().zip(&pred).map(|(t, p)| t - p).collect();
        let features = if config.feature_fraction < 1.0 && n_features > 0 {
            let k = ((config.feature_fraction * n_features as f64).round() as usize).clamp(1, n_features);
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(m as u64));
            let mut picked = rand::seq::index::sample(&mut rng, n_features, k).into_vec();
            picked.sort_unstable();
            picked
        } else {
            all_features.clone()
        };
        let builder = TreeBuilder {
            columns: &columns,
            residuals: &residuals,
            min_leaf: config.min_samples_leaf,
            max_depth: config.max_depth,
        };
        let (tree, leaf_of_row) = builder.build(&presorted, &features);
        for (p, leaf) in pred.iter_mut().zip(&leaf_of_row) {
            *p += config.learning_rate * leaf;
        }
        training_loss.push(loss(&pred));
        trees.push(tree);
    }

    Ok(GbdtModel {
        feature_names: x.columns().to_vec(),
        base_prediction: base,
        trees,
        config: config.clone(),
        training_loss,
    })
}

impl GbdtModel {
    /// Predictions for every row of `x`, matching columns by name.
    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        let idx: Vec<usize> = self
            .feature_names
            .iter()
            .map(|name| x.column_index(name).ok_or_else(|| Error::MissingColumn(name.clone())))
            .collect::<Result<_>>()?;
        let mut buf = vec![0.0; idx.len()];
        Ok((0..x.n_rows())
            .map(|r| {
                let row = x.row(r);
                for (slot, &c) in buf.iter_mut().zip(&idx) {
                    *slot = row[c];
                }
                self.predict_row(&buf)
            })
            .collect())
    }

    /// Prediction for one row given in the model's feature order.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        self.base_prediction + self.config.learning_rate * sum
    }

    /// Share of the total squared-error reduction credited to each feature.
    ///
    /// Empty when no tree splits; otherwise every feature is listed and the
    /// values sum to one.
    pub fn feature_importance(&self) -> BTreeMap<String, f64> {
        let mut gains = vec![0.0; self.feature_names.len()];
        for tree in &self.trees {
            tree.visit_splits(&mut |f, g| gains[f] += g);
        }
        let total: f64 = gains.iter().sum();
        if total <= 0.0 {
            return BTreeMap::new();
        }
        self.feature_names
            .iter()
            .zip(gains)
            .map(|(name, g)| (name.clone(), g / total))
            .collect()
    }
}

pub fn gbdt_predict(model: &GbdtModel, x: &FeatureMatrix) -> Result<Vec<f64>> {
    model.predict(x)
}

pub fn feature_importance(model: &GbdtModel) -> BTreeMap<String, f64> {
    model.feature_importance()
}

enum ArenaNode {
    Pending,
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        left: usize,
        right: usize,
    },
}

struct TreeBuilder<'a> {
    columns: &'a [Vec<f64>],
    residuals: &'a [f64],
    min_leaf: usize,
    max_depth: usize,
}

#[derive(Clone, Copy)]
struct Segment {
    node: usize,
    start: usize,
    len: usize,
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    threshold: f64,
}

impl TreeBuilder<'_> {
    /// Returns the tree and the (unshrunk) leaf value reached by each row.
    fn build(&self, presorted: &[Vec<u32>], features: &[usize]) -> (TreeNode, Vec<f64>) {
        let n = self.residuals.len();
        let mut arena = vec![ArenaNode::Pending];
        let mut leaf_of_row = vec![0.0; n];
        let mut node_of_row: Vec<Option<usize>> = vec![Some(0); n];
        // One sorted row list per offered feature, grouped by node in level order.
        let mut orders: Vec<Vec<u32>> = features.iter().map(|&f| presorted[f].clone()).collect();
        let mut level = vec![Segment { node: 0, start: 0, len: n }];
        let all_rows: Vec<u32> = (0..n as u32).collect();

        for _depth in 0..self.max_depth {
            if level.is_empty() {
                break;
            }
            let rows_of = |seg: &Segment| -> &[u32] {
                match orders.first() {
                    Some(o) => &o[seg.start..seg.start + seg.len],
                    None => &all_rows[seg.start..seg.start + seg.len],
                }
            };
            let moments: Vec<(f64, f64)> = level
                .iter()
                .map(|seg| {
                    rows_of(seg).iter().fold((0.0, 0.0), |(s, q), &r| {
                        let v = self.residuals[r as usize];
                        (s + v, q + v * v)
                    })
                })
                .collect();
            let per_feature: Vec<Vec<Option<Candidate>>> = features
                .par_iter()
                .zip(orders.par_iter())
                .map(|(&f, order)| {
                    level
                        .iter()
                        .zip(&moments)
                        .map(|(seg, &(sum, _))| {
                            self.best_split(&self.columns[f], &order[seg.start..seg.start + seg.len], sum)
                        })
                        .collect()
                })
                .collect();

            let mut next_level_nodes = Vec::new();
            for (li, seg) in level.iter().enumerate() {
                let (sum, sumsq) = moments[li];
                let floor = RELATIVE_GAIN_FLOOR * sumsq;
                let mut best: Option<(usize, Candidate)> = None;
                for (fi, &f) in features.iter().enumerate() {
                    if let Some(c) = per_feature[fi][li] {
                        if c.gain > floor && c.gain > 0.0 && best.is_none_or(|(_, b)| c.gain > b.gain) {
                            best = Some((f, c));
                        }
                    }
                }
                match best {
                    Some((feature, c)) => {
                        let left = arena.len();
                        arena.push(ArenaNode::Pending);
                        arena.push(ArenaNode::Pending);
                        arena[seg.node] = ArenaNode::Split {
                            feature,
                            threshold: c.threshold,
                            gain: c.gain,
                            left,
                            right: left + 1,
                        };
                        let col = &self.columns[feature];
                        for &r in rows_of(seg) {
                            let r = r as usize;
                            node_of_row[r] = Some(if col[r] <= c.threshold { left } else { left + 1 });
                        }
                        next_level_nodes.push(left);
                        next_level_nodes.push(left + 1);
                    }
                    None => {
                        let value = sum / seg.len as f64;
                        arena[seg.node] = ArenaNode::Leaf(value);
                        for &r in rows_of(seg) {
                            leaf_of_row[r as usize] = value;
                            node_of_row[r as usize] = None;
                        }
                    }
                }
            }

            // Stable partition of every sorted list by child node.
            let position: BTreeMap<usize, usize> =
                next_level_nodes.iter().enumerate().map(|(i, &node)| (node, i)).collect();
            let mut counts = vec![0usize; next_level_nodes.len()];
            for node in node_of_row.iter().flatten() {
                counts[position[node]] += 1;
            }
            let mut starts = vec![0usize; counts.len()];
            for i in 1..counts.len() {
                starts[i] = starts[i - 1] + counts[i - 1];
            }
            let total: usize = counts.iter().sum();
            let node_of_row = &node_of_row;
            let partition = |order: &Vec<u32>| {
                let mut out = vec![0u32; total];
                let mut cursor = starts.clone();
                for &r in order {
                    if let Some(node) = node_of_row[r as usize] {
                        let p = position[&node];
                        out[cursor[p]] = r;
                        cursor[p] += 1;
                    }
                }
                out
            };
            if orders.is_empty() {
                // No features offered: nothing can split, the level above made leaves.
                level.clear();
                continue;
            }
            orders = orders.par_iter().map(partition).collect();
            level = next_level_nodes
                .iter()
                .enumerate()
                .map(|(i, &node)| Segment {
                    node,
                    start: starts[i],
                    len: counts[i],
                })
                .collect();
        }

        for seg in &level {
            let rows: &[u32] = match orders.first() {
                Some(o) => &o[seg.start..seg.start + seg.len],
                None => &all_rows[seg.start..seg.start + seg.len],
            };
            let value = rows.iter().map(|&r| self.residuals[r as usize]).sum::<f64>() / seg.len as f64;
            arena[seg.node] = ArenaNode::Leaf(value);
            for &r in rows {
                leaf_of_row[r as usize] = value;
            }
        }
        (materialize(&arena, 0), leaf_of_row)
    }

    fn best_split(&self, col: &[f64], rows: &[u32], total: f64) -> Option<Candidate> {
        let n = rows.len();
        if n < 2 * self.min_leaf {
            return None;
        }
        let mut best: Option<Candidate> = None;
        let mut left_sum = 0.0;
        let parent = total * total / n as f64;
        for i in 0..n - 1 {
            let r = rows[i] as usize;
            left_sum += self.residuals[r];
            let n_left = i + 1;
            let n_right = n - n_left;
            if n_right < self.min_leaf {
                break;
            }
            if n_left < self.min_leaf {
                continue;
            }
            let v = col[r];
            let v_next = col[rows[i + 1] as usize];
            if v == v_next {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / n_left as f64 + right_sum * right_sum / n_right as f64 - parent;
            if best.is_none_or(|b| gain > b.gain) {
                let mid = v + (v_next - v) / 2.0;
                let threshold = if mid < v_next { mid } else { v };
                best = Some(Candidate { gain, threshold });
            }
        }
        best
    }
}

fn materialize(arena: &[ArenaNode], idx: usize) -> TreeNode {
    match arena[idx] {
        ArenaNode::Leaf(value) => TreeNode::Leaf { value },
        ArenaNode::Pending => TreeNode::Leaf { value: 0.0 },
        ArenaNode::Split {
            feature,
            threshold,
            gain,
            left,
            right,
        } => TreeNode::Split {
            feature,
            threshold,
            gain,
            left: Box::new(materialize(arena, left)),
            right: Box::new(materialize(arena, right)),
        },
    }
}
