use log::warn;

use super::{FiniteSum, Objective, ProblemMetadata};
use crate::error::{Error, Result};
use crate::ingest::SparseRow;

/// Compressed sparse row matrix with 0-based column indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseMatrix {
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    n_cols: usize,
}

impl SparseMatrix {
    /// Builds from LIBSVM rows (1-based, strictly increasing indices).
    pub fn from_rows(rows: &[SparseRow], n_cols: usize) -> Result<Self> {
        let nnz = rows.iter().map(|r| r.indices.len()).sum();
        let mut m = SparseMatrix {
            indptr: Vec::with_capacity(rows.len() + 1),
            indices: Vec::with_capacity(nnz),
            values: Vec::with_capacity(nnz),
            n_cols,
        };
        m.indptr.push(0);
        for row in rows {
            for (&idx, &v) in row.indices.iter().zip(&row.values) {
                if idx == 0 || idx as usize > n_cols {
                    return Err(Error::usage(format!(
                        "feature index {idx} outside 1..={n_cols}"
                    )));
                }
                m.indices.push(idx - 1);
                m.values.push(v);
            }
            m.indptr.push(m.indices.len());
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len().saturating_sub(1)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_dot(&self, i: usize, w: &[f64]) -> f64 {
        let (idx, vals) = self.row(i);
        idx.iter().zip(vals).map(|(&j, v)| v * w[j as usize]).sum()
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.row(i).1.iter().map(|v| v * v).sum()
    }
}

/// Feature rows paired with ±1 labels.
#[derive(Debug, Clone, Copy)]
pub struct DataSlice<'a> {
    pub features: &'a SparseMatrix,
    pub labels: &'a [f64],
}

impl DataSlice<'_> {
    fn check(&self, weights: &[f64]) -> Result<()> {
        if self.labels.is_empty() {
            return Err(Error::usage("empty data slice"));
        }
        if self.labels.len() != self.features.n_rows() {
            return Err(Error::usage("label count differs from feature row count"));
        }
        if weights.len() < self.features.n_cols() {
            return Err(Error::usage(format!(
                "weight dimension {} is below the feature dimension {}",
                weights.len(),
                self.features.n_cols()
            )));
        }
        Ok(())
    }
}

/// `log(1 + e^t)` without overflow for large `t`.
fn log1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Logistic sigmoid `1/(1 + e^{−u})`.
fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Mean of `log(1 + exp(−yᵢ wᵀzᵢ))` over the slice.
pub fn logistic_loss(weights: &[f64], data: DataSlice<'_>) -> Result<f64> {
    data.check(weights)?;
    let total: f64 = data
        .labels
        .iter()
        .enumerate()
        .map(|(i, &y)| log1p_exp(-y * data.features.row_dot(i, weights)))
        .sum();
    Ok(total / data.labels.len() as f64)
}

fn add_row_gradient(data: DataSlice<'_>, i: usize, w: &[f64], scale: f64, out: &mut [f64]) {
    let y = data.labels[i];
    let coef = -y * sigmoid(-y * data.features.row_dot(i, w)) * scale;
    let (idx, vals) = data.features.row(i);
    for (&j, v) in idx.iter().zip(vals) {
        out[j as usize] += coef * v;
    }
}

pub fn logistic_gradient(weights: &[f64], data: DataSlice<'_>) -> Result<Vec<f64>> {
    data.check(weights)?;
    let mut out = vec![0.0; weights.len()];
    let scale = 1.0 / data.labels.len() as f64;
    for i in 0..data.labels.len() {
        add_row_gradient(data, i, weights, scale, &mut out);
    }
    Ok(out)
}

/// Fraction of rows with `sign(wᵀz) = y`; a zero margin counts as wrong.
pub fn classification_accuracy(weights: &[f64], data: DataSlice<'_>) -> Result<f64> {
    data.check(weights)?;
    let correct = data
        .labels
        .iter()
        .enumerate()
        .filter(|(i, &y)| y * data.features.row_dot(*i, weights) > 0.0)
        .count();
    Ok(correct as f64 / data.labels.len() as f64)
}

/// Maps a raw LIBSVM label onto {−1, +1}: positive → +1, otherwise → −1.
fn map_label(raw: f64) -> f64 {
    if raw > 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn map_labels(rows: &[SparseRow], which: &str) -> Vec<f64> {
    let mut remapped = 0usize;
    let labels = rows
        .iter()
        .map(|r| {
            let y = map_label(r.label);
            if y != r.label {
                remapped += 1;
            }
            y
        })
        .collect();
    if remapped > 0 {
        warn!("{which}: {remapped} labels outside {{-1,+1}} mapped (0 and negatives -> -1, positives -> +1)");
    }
    labels
}

/// Binary logistic regression `f(w) = (1/N) Σ log(1 + exp(−yᵢ wᵀzᵢ))`
/// over a training set, with an optional held-out test set.
#[derive(Debug, Clone)]
pub struct LogisticProblem {
    train: SparseMatrix,
    train_labels: Vec<f64>,
    test: Option<(SparseMatrix, Vec<f64>)>,
    meta: ProblemMetadata,
}

impl LogisticProblem {
    /// The feature dimension is the largest index over train ∪ test.
    pub fn from_rows(train: &[SparseRow], test: Option<&[SparseRow]>) -> Result<Self> {
        let max_index = |rows: &[SparseRow]| {
            rows.iter()
                .filter_map(|r| r.indices.last().copied())
                .max()
                .unwrap_or(0) as usize
        };
        let dim = max_index(train)
            .max(test.map(max_index).unwrap_or(0))
            .max(1);
        Self::from_rows_with_dim(train, test, dim)
    }

    pub fn from_rows_with_dim(
        train: &[SparseRow],
        test: Option<&[SparseRow]>,
        dim: usize,
    ) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::usage(
                "logistic problem needs at least one training pair",
            ));
        }
        let features = SparseMatrix::from_rows(train, dim)?;
        let train_labels = map_labels(train, "training set");
        let test = match test {
            Some(rows) if !rows.is_empty() => Some((
                SparseMatrix::from_rows(rows, dim)?,
                map_labels(rows, "testing set"),
            )),
            _ => None,
        };
        let n = features.n_rows() as f64;
        let lipschitz = (0..features.n_rows())
            .map(|i| features.row_norm_sq(i))
            .sum::<f64>()
            / (4.0 * n);
        // all-zero features give a constant objective; keep L positive
        let lipschitz = if lipschitz > 0.0 {
            lipschitz
        } else {
            f64::MIN_POSITIVE
        };
        Ok(Self {
            train: features,
            train_labels,
            test,
            meta: ProblemMetadata::new(dim, Some(lipschitz), None, None)?,
        })
    }

    /// Dense convenience constructor, mainly for tests.
    pub fn from_dense(
        train: &[Vec<f64>],
        labels: &[f64],
        test: Option<(&[Vec<f64>], &[f64])>,
    ) -> Result<Self> {
        let to_rows = |x: &[Vec<f64>], y: &[f64]| -> Vec<SparseRow> {
            x.iter()
                .zip(y)
                .map(|(z, &label)| {
                    let (indices, values) = z
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0.0)
                        .map(|(j, &v)| (j as u32 + 1, v))
                        .unzip();
                    SparseRow {
                        label,
                        indices,
                        values,
                    }
                })
                .collect()
        };
        if train.len() != labels.len() {
            return Err(Error::usage("feature and label counts differ"));
        }
        let dim = train
            .iter()
            .chain(test.iter().flat_map(|(x, _)| x.iter()))
            .map(|z| z.len())
            .max()
            .unwrap_or(1)
            .max(1);
        let train_rows = to_rows(train, labels);
        let test_rows = test.map(|(x, y)| to_rows(x, y));
        Self::from_rows_with_dim(&train_rows, test_rows.as_deref(), dim)
    }

    pub fn train(&self) -> DataSlice<'_> {
        DataSlice {
            features: &self.train,
            labels: &self.train_labels,
        }
    }

    pub fn test(&self) -> Option<DataSlice<'_>> {
        self.test
            .as_ref()
            .map(|(features, labels)| DataSlice { features, labels })
    }
}

impl Objective for LogisticProblem {
    fn metadata(&self) -> &ProblemMetadata {
        &self.meta
    }

    fn value(&self, x: &[f64]) -> f64 {
        logistic_loss(x, self.train()).unwrap_or(f64::NAN)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        logistic_gradient(x, self.train()).unwrap_or_else(|_| vec![f64::NAN; x.len()])
    }
}

impl FiniteSum for LogisticProblem {
    fn n_components(&self) -> usize {
        self.train_labels.len()
    }

    fn add_component_gradient(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) {
        add_row_gradient(self.train(), i, x, scale, out);
    }
}
