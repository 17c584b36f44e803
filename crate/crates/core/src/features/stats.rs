use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Summary statistics of a series. `std` is the population deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub std: f64,
    pub sum: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub mean: f64,
}

impl SeriesStats {
    pub const NAMES: [&'static str; 6] = ["std", "sum", "min", "max", "median", "mean"];

    /// Values in the order of [`Self::NAMES`].
    pub fn values(&self) -> [f64; 6] {
        [self.std, self.sum, self.min, self.max, self.median, self.mean]
    }
}

pub fn series_stats(values: &[f64]) -> Result<SeriesStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput("series statistics need at least one value"));
    }
    let n = values.len() as f64;
    let sum: f64 = values.iter().sum();
    let mean = sum / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    Ok(SeriesStats {
        std: var.sqrt(),
        sum,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        median,
        mean,
    })
}
