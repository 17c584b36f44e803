//! Ranker families: the paper-count baseline, boosted trees and a
//! random-intercept mixed model.

mod gbdt;
mod mixed;
mod prob;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tsv;

pub use gbdt::{feature_importance, gbdt_fit, gbdt_predict, GbdtConfig, GbdtModel, TreeNode};
pub use mixed::{
    backward_eliminate, group_label, group_labels, mixed_fit, EliminatedEffect, MixedConfig, MixedModel, INTERCEPT,
};
pub use prob::{prob_fit, ProbModel};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Model {
    Prob(ProbModel),
    Gbdt(GbdtModel),
    Mixed(MixedModel),
}

#[derive(Serialize, Deserialize)]
struct SavedModel {
    format_version: u32,
    model: Model,
}

pub fn save_model(path: &Path, model: &Model) -> Result<()> {
    tsv::write_json(
        path,
        &SavedModel {
            format_version: MODEL_FORMAT_VERSION,
            model: model.clone(),
        },
    )
}

pub fn load_model(path: &Path) -> Result<Model> {
    let saved: SavedModel = tsv::read_json(path)?;
    if saved.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Schema(format!(
            "model format version {} (expected {MODEL_FORMAT_VERSION})",
            saved.format_version
        )));
    }
    Ok(saved.model)
}
