//! Full-batch gradient descent on mean log-loss.

use std::path::Path;

use super::model::{LinearModel, ModelKind};

/// Labelled feature rows for one model kind.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    pub kind: ModelKind,
    pub rows: Vec<(Vec<f64>, bool)>,
}

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("learning rate must be positive, got {0}")]
    LearningRate(f64),
    #[error("epochs must be at least 1")]
    Epochs,
    #[error("training data is empty")]
    Empty,
    #[error("training data has a single label; need both 0 and 1")]
    SingleLabel,
    #[error("row {row} has {found} features, expected {expected}")]
    DimensionMismatch { row: usize, expected: usize, found: usize },
    #[error("training data: {0}")]
    Csv(#[from] csv::Error),
    #[error("training data row {row}: {message}")]
    BadValue { row: usize, message: String },
}

impl TrainingSet {
    pub fn new(kind: ModelKind, rows: Vec<(Vec<f64>, bool)>) -> TrainingSet {
        TrainingSet { kind, rows }
    }

    pub fn dimension(&self) -> Option<usize> {
        self.rows.first().map(|(f, _)| f.len())
    }

    pub fn validate(&self) -> Result<usize, TrainError> {
        let dim = self.dimension().ok_or(TrainError::Empty)?;
        for (row, (f, _)) in self.rows.iter().enumerate() {
            if f.len() != dim {
                return Err(TrainError::DimensionMismatch {
                    row: row + 1,
                    expected: dim,
                    found: f.len(),
                });
            }
        }
        let positives = self.rows.iter().filter(|(_, y)| *y).count();
        if positives == 0 || positives == self.rows.len() {
            return Err(TrainError::SingleLabel);
        }
        Ok(dim)
    }

    /// Reads a CSV with a header row: feature columns, then `label` (0/1).
    pub fn from_csv(kind: ModelKind, reader: impl std::io::Read) -> Result<TrainingSet, TrainError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().next_back().map(str::trim) != Some("label") {
            return Err(TrainError::BadValue {
                row: 0,
                message: "last column must be `label`".into(),
            });
        }
        let mut rows = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let values = record
                .iter()
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| TrainError::BadValue {
                    row: i + 1,
                    message: e.to_string(),
                })?;
            let (label, features) = values.split_last().expect("csv record has header width");
            let label = match *label {
                0.0 => false,
                1.0 => true,
                l => {
                    return Err(TrainError::BadValue {
                        row: i + 1,
                        message: format!("label must be 0 or 1, got {l}"),
                    })
                }
            };
            rows.push((features.to_vec(), label));
        }
        Ok(TrainingSet { kind, rows })
    }

    pub fn load_csv(kind: ModelKind, path: impl AsRef<Path>) -> Result<TrainingSet, TrainError> {
        let file = std::fs::File::open(path).map_err(csv::Error::from)?;
        Self::from_csv(kind, file)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let dim = self.dimension().unwrap_or(0);
        let names: Vec<String> = if dim == self.kind.dimension() {
            self.kind.feature_names().iter().map(|s| s.to_string()).collect()
        } else {
            (1..=dim).map(|i| format!("f{i}")).collect()
        };
        out.push_str(&names.join(","));
        out.push_str(",label\n");
        for (f, y) in &self.rows {
            let cells: Vec<String> = f.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push_str(if *y { ",1\n" } else { ",0\n" });
        }
        out
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean log-loss of `model` on `data`.
pub fn mean_log_loss(model: &LinearModel, data: &TrainingSet) -> f64 {
    let total: f64 = data
        .rows
        .iter()
        .map(|(f, y)| {
            let z = model.logit(f).expect("validated dimension");
            // −[y ln σ(z) + (1−y) ln(1−σ(z))] = softplus(z) − y·z
            softplus(z) - if *y { z } else { 0.0 }
        })
        .sum();
    total / data.rows.len() as f64
}

/// Analytic gradient of the mean log-loss: weights, then bias.
pub fn gradient(model: &LinearModel, data: &TrainingSet) -> (Vec<f64>, f64) {
    let mut grad = vec![0.0; model.weights().len()];
    let mut grad_bias = 0.0;
    for (f, y) in &data.rows {
        let residual = model.score(f).expect("validated dimension") - if *y { 1.0 } else { 0.0 };
        for (g, x) in grad.iter_mut().zip(f) {
            *g += residual * x;
        }
        grad_bias += residual;
    }
    let n = data.rows.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (grad, grad_bias / n)
}

/// Trains from `init`; the loss history holds the loss at the start of each
/// epoch.
pub fn train(
    init: &LinearModel,
    data: &TrainingSet,
    learning_rate: f64,
    epochs: usize,
) -> Result<(LinearModel, Vec<f64>), TrainError> {
    if learning_rate.is_nan() || learning_rate <= 0.0 || !learning_rate.is_finite() {
        return Err(TrainError::LearningRate(learning_rate));
    }
    if epochs == 0 {
        return Err(TrainError::Epochs);
    }
    let dim = data.validate()?;
    if dim != init.weights().len() {
        return Err(TrainError::DimensionMismatch {
            row: 1,
            expected: init.weights().len(),
            found: dim,
        });
    }
    let mut model = init.clone();
    let mut history = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        history.push(mean_log_loss(&model, data));
        let (grad, grad_bias) = gradient(&model, data);
        let (weights, bias) = model.parts_mut();
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= learning_rate * g;
        }
        *bias -= learning_rate * grad_bias;
    }
    Ok((model, history))
}
