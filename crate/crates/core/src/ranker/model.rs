use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Which feature schema a model scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Passage,
    Answer,
}

impl ModelKind {
    pub fn dimension(self) -> usize {
        self.feature_names().len()
    }

    pub fn feature_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Passage => &[
                "matching_lexeme_count",
                "matching_lexeme_ratio",
                "proper_name_overlap",
                "bm25",
                "passage_length_log",
            ],
            ModelKind::Answer => &[
                "relax_count",
                "proof_level",
                "retrieval_score",
                "passage_support_ratio",
                "answer_is_ground",
            ],
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Passage => "passage",
            ModelKind::Answer => "answer",
        }
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "passage" => Ok(ModelKind::Passage),
            "answer" => Ok(ModelKind::Answer),
            other => Err(ModelError::Format(format!("unknown model kind {other:?}"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("dimension mismatch: model has {expected} weights, got {found} features")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite model parameter")]
    NonFinite,
    #[error("model file: {0}")]
    Format(String),
    #[error("model file: {0}")]
    Io(#[from] std::io::Error),
}

/// Logistic-regression model: `sigmoid(w·f + b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    kind: ModelKind,
    weights: Vec<f64>,
    bias: f64,
}

impl LinearModel {
    pub fn new(kind: ModelKind, weights: Vec<f64>, bias: f64) -> Result<LinearModel, ModelError> {
        if weights.len() != kind.dimension() {
            return Err(ModelError::DimensionMismatch {
                expected: kind.dimension(),
                found: weights.len(),
            });
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        Ok(LinearModel { kind, weights, bias })
    }

    pub fn zeros(kind: ModelKind) -> LinearModel {
        LinearModel {
            kind,
            weights: vec![0.0; kind.dimension()],
            bias: 0.0,
        }
    }

    /// A model over an arbitrary dimension, not tied to a feature schema.
    /// Used for ad hoc data such as the separable training fixtures.
    pub fn with_dimension(kind: ModelKind, weights: Vec<f64>, bias: f64) -> LinearModel {
        LinearModel { kind, weights, bias }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut f64) {
        (&mut self.weights, &mut self.bias)
    }

    pub fn logit(&self, features: &[f64]) -> Result<f64, ModelError> {
        if features.len() != self.weights.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.weights.len(),
                found: features.len(),
            });
        }
        Ok(self.weights.iter().zip(features).map(|(w, f)| w * f).sum::<f64>() + self.bias)
    }

    pub fn score(&self, features: &[f64]) -> Result<f64, ModelError> {
        self.logit(features).map(sigmoid)
    }

    pub fn to_text(&self) -> String {
        let weights: Vec<String> = self.weights.iter().map(|w| format!("{w:?}")).collect();
        format!("{}\n{:?}\n{}\n", self.kind, self.bias, weights.join(" "))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<LinearModel, ModelError> {
        std::fs::read_to_string(path)?.parse()
    }
}

impl FromStr for LinearModel {
    type Err = ModelError;

    /// `.lrm` format: schema tag, bias, space-separated weights.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines();
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| ModelError::Format(format!("missing {what} line")))
        };
        let kind: ModelKind = next("schema")?.parse()?;
        let bias = parse_f64(next("bias")?)?;
        let weights = next("weights")?
            .split_whitespace()
            .map(parse_f64)
            .collect::<Result<Vec<_>, _>>()?;
        LinearModel::new(kind, weights, bias)
    }
}

fn parse_f64(s: &str) -> Result<f64, ModelError> {
    s.trim()
        .parse()
        .map_err(|_| ModelError::Format(format!("not a number: {s:?}")))
}

/// Logistic function, evaluated without overflow for any finite input.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
