use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::spec::FeatureSetSpec;
use crate::error::{Error, Result};
use crate::ids::{AffiliationId, ConferenceId};
use crate::tsv;

/// Identifies one matrix row: a pair at a target year.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RowKey {
    pub conference: ConferenceId,
    pub affiliation: AffiliationId,
    pub year: i32,
}

/// Row-major numeric features with row keys and, when known, targets.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    columns: Vec<String>,
    keys: Vec<RowKey>,
    values: Vec<f64>,
    targets: Option<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(columns: Vec<String>, keys: Vec<RowKey>, values: Vec<f64>, targets: Option<Vec<f64>>) -> Result<Self> {
        let unique: BTreeSet<&String> = columns.iter().collect();
        if unique.len() != columns.len() {
            return Err(Error::InvalidParameter("duplicate feature column names".into()));
        }
        if values.len() != keys.len() * columns.len() {
            return Err(Error::LengthMismatch {
                expected: keys.len() * columns.len(),
                actual: values.len(),
            });
        }
        if let Some(t) = &targets {
            if t.len() != keys.len() {
                return Err(Error::LengthMismatch {
                    expected: keys.len(),
                    actual: t.len(),
                });
            }
            if let Some(row) = t.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { what: "target".into(), row });
            }
        }
        if !columns.is_empty() {
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    what: columns[i % columns.len()].clone(),
                    row: i / columns.len(),
                });
            }
        }
        Ok(Self {
            columns,
            keys,
            values,
            targets,
        })
    }

    /// Builds a matrix from plain rows, keyed by position (handy for models
    /// trained outside the panel pipeline).
    pub fn from_rows(columns: &[&str], rows: &[Vec<f64>], targets: Option<Vec<f64>>) -> Result<Self> {
        let keys = (0..rows.len())
            .map(|i| RowKey {
                conference: ConferenceId::new(""),
                affiliation: AffiliationId::new(format!("row{i}")),
                year: 0,
            })
            .collect();
        for row in rows {
            if row.len() != columns.len() {
                return Err(Error::LengthMismatch {
                    expected: columns.len(),
                    actual: row.len(),
                });
            }
        }
        Self::new(
            columns.iter().map(|c| c.to_string()).collect(),
            keys,
            rows.concat(),
            targets,
        )
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn keys(&self) -> &[RowKey] {
        &self.keys
    }

    pub fn n_rows(&self) -> usize {
        self.keys.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.columns.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.columns.len() + col]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|r| self.value(r, col)).collect()
    }

    pub fn targets(&self) -> Option<&[f64]> {
        self.targets.as_deref()
    }

    pub fn with_targets(mut self, targets: Vec<f64>) -> Result<Self> {
        self.targets = Some(targets);
        Self::new(self.columns, self.keys, self.values, self.targets)
    }

    /// The matrix restricted to `names`, in that order.
    pub fn select(&self, names: &[String]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.column_index(n).ok_or_else(|| Error::MissingColumn(n.clone())))
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(self.n_rows() * idx.len());
        for r in 0..self.n_rows() {
            let row = self.row(r);
            values.extend(idx.iter().map(|&c| row[c]));
        }
        Ok(Self {
            columns: names.to_vec(),
            keys: self.keys.clone(),
            values,
            targets: self.targets.clone(),
        })
    }

    /// Row subset in the given order.
    pub fn take_rows(&self, rows: &[usize]) -> Self {
        let mut values = Vec::with_capacity(rows.len() * self.n_cols());
        for &r in rows {
            values.extend_from_slice(self.row(r));
        }
        Self {
            columns: self.columns.clone(),
            keys: rows.iter().map(|&r| self.keys[r].clone()).collect(),
            values,
            targets: self
                .targets
                .as_ref()
                .map(|t| rows.iter().map(|&r| t[r]).collect()),
        }
    }

    /// Stacks matrices with identical columns. Targets survive only if every
    /// part has them.
    pub fn vstack(parts: &[FeatureMatrix]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::EmptyInput("nothing to stack"));
        };
        let mut keys = Vec::new();
        let mut values = Vec::new();
        let mut targets = Some(Vec::new());
        for part in parts {
            if part.columns != first.columns {
                return Err(Error::InvalidParameter("stacked matrices differ in columns".into()));
            }
            keys.extend_from_slice(&part.keys);
            values.extend_from_slice(&part.values);
            match (&mut targets, &part.targets) {
                (Some(acc), Some(t)) => acc.extend_from_slice(t),
                _ => targets = None,
            }
        }
        Ok(Self {
            columns: first.columns.clone(),
            keys,
            values,
            targets,
        })
    }
}

/// Rows that needed imputation during assembly.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImputationCounters {
    /// Rows whose deepest window reached before the panel's first year.
    pub zero_extended_rows: usize,
    /// Rows with too short a history to fit a smoothing parameter.
    pub ses_fit_fallback_rows: usize,
    /// Rows without a single defined author impact factor.
    pub aif_absent_rows: usize,
}

/// JSON sidecar written next to an exported matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub spec: FeatureSetSpec,
    pub target_year: i32,
    pub conferences: Vec<ConferenceId>,
    pub columns: Vec<String>,
    pub imputation: ImputationCounters,
}

const KEY_COLUMNS: [&str; 3] = ["conference", "affiliation", "year"];
const TARGET_COLUMN: &str = "target";

/// Path of the sidecar for a matrix file: `x.tsv` → `x.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes the matrix as TSV with a header row. The target column is
/// present only when targets are known.
pub fn write_matrix(path: &Path, matrix: &FeatureMatrix, sidecar: Option<&MatrixSidecar>) -> Result<()> {
    let mut w = tsv::create(path)?;
    let mut header: Vec<&str> = KEY_COLUMNS.to_vec();
    header.extend(matrix.columns.iter().map(String::as_str));
    if matrix.targets.is_some() {
        header.push(TARGET_COLUMN);
    }
    tsv::write_line(&mut w, path, &header)?;
    for r in 0..matrix.n_rows() {
        let key = &matrix.keys[r];
        let mut fields = vec![key.conference.to_string(), key.affiliation.to_string(), key.year.to_string()];
        fields.extend(matrix.row(r).iter().map(|v| tsv::fmt_f64(*v)));
        if let Some(t) = &matrix.targets {
            fields.push(tsv::fmt_f64(t[r]));
        }
        let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
        tsv::write_line(&mut w, path, &refs)?;
    }
    tsv::finish(w, path)?;
    if let Some(sidecar) = sidecar {
        tsv::write_json(&sidecar_path(path), sidecar)?;
    }
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<FeatureMatrix> {
    let reader = tsv::open(path)?;
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line.map_err(|e| Error::io(path, e))?,
        None => return Err(Error::EmptyInput("feature matrix file has no header")),
    };
    let header: Vec<&str> = header.split('\t').collect();
    if header.len() < KEY_COLUMNS.len() || header[..3] != KEY_COLUMNS {
        return Err(Error::Schema(format!(
            "{}: header must start with conference, affiliation, year",
            path.display()
        )));
    }
    let has_target = header.last() == Some(&TARGET_COLUMN);
    let feature_end = header.len() - usize::from(has_target);
    let columns: Vec<String> = header[3..feature_end].iter().map(|s| s.to_string()).collect();

    let mut keys = Vec::new();
    let mut values = Vec::new();
    let mut targets = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let malformed = |reason: String| Error::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != header.len() {
            return Err(malformed(format!("expected {} columns, found {}", header.len(), f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| malformed(format!("bad number `{s}`")));
        keys.push(RowKey {
            conference: f[0].into(),
            affiliation: f[1].into(),
            year: f[2].parse().map_err(|_| malformed(format!("bad year `{}`", f[2])))?,
        });
        for s in &f[3..feature_end] {
            values.push(num(s)?);
        }
        if has_target {
            targets.push(num(f[feature_end])?);
        }
    }
    FeatureMatrix::new(columns, keys, values, has_target.then_some(targets))
}
