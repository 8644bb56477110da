//! The prediction interface the explainer queries, two reference
//! classifiers and a line-delimited JSON bridge to external models.

mod external;
mod logistic;
mod ridge;

use std::path::Path;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SmxError};

pub use external::{ExternalModel, MAX_REQUEST_BYTES};
pub use logistic::{fit_logistic, LogisticModel, LogisticOptions, LogisticObjective};
pub use ridge::{fit_ridge, RidgeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Continuous,
    Probabilistic,
}

/// Any binary spectral classifier. Implementations must be deterministic:
/// identical inputs give identical outputs.
pub trait SpectralModel: Send + Sync {
    fn kind(&self) -> ModelKind;

    fn n_features(&self) -> usize;

    /// Raw continuous outputs (continuous models only).
    fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<f64>>;

    /// m × 2 class probabilities, columns ordered by class id
    /// (probabilistic models only).
    fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Array2<f64>>;

    /// Whichever output the model's kind provides.
    fn outputs(&self, x: ArrayView2<f64>) -> Result<ModelOutputs> {
        match self.kind() {
            ModelKind::Continuous => self.predict(x).map(ModelOutputs::Continuous),
            ModelKind::Probabilistic => self.predict_proba(x).map(ModelOutputs::Probabilities),
        }
    }
}

/// Model outputs for a batch of rows.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelOutputs {
    Continuous(Vec<f64>),
    Probabilities(Array2<f64>),
}

/// Decision threshold for continuous outputs on 0/1-coded labels.
pub const CONTINUOUS_DECISION_THRESHOLD: f64 = 0.5;

impl ModelOutputs {
    pub fn len(&self) -> usize {
        match self {
            ModelOutputs::Continuous(v) => v.len(),
            ModelOutputs::Probabilities(p) => p.nrows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn select(&self, rows: &[usize]) -> ModelOutputs {
        match self {
            ModelOutputs::Continuous(v) => ModelOutputs::Continuous(rows.iter().map(|&i| v[i]).collect()),
            ModelOutputs::Probabilities(p) => {
                ModelOutputs::Probabilities(p.select(ndarray::Axis(0), rows))
            }
        }
    }

    /// Predicted class of row `i`: `ŷ > 0.5` for continuous outputs,
    /// argmax for probabilities (ties to class 0).
    pub fn predicted_class(&self, i: usize) -> u8 {
        match self {
            ModelOutputs::Continuous(v) => u8::from(v[i] > CONTINUOUS_DECISION_THRESHOLD),
            ModelOutputs::Probabilities(p) => u8::from(p[[i, 1]] > p[[i, 0]]),
        }
    }

    /// Mean absolute change between two batches: plain MAE for continuous
    /// outputs, class-averaged probability shift for probabilities.
    pub fn impact(&self, perturbed: &ModelOutputs) -> Result<f64> {
        match (self, perturbed) {
            (ModelOutputs::Continuous(a), ModelOutputs::Continuous(b)) => impact_continuous(a, b),
            (ModelOutputs::Probabilities(a), ModelOutputs::Probabilities(b)) => {
                impact_probabilistic(a.view(), b.view())
            }
            _ => Err(SmxError::Model("mixed output kinds in impact".into())),
        }
    }
}

/// `(1/m) Σ |y − y_pert|`. Zero for empty input.
pub fn impact_continuous(y: &[f64], y_pert: &[f64]) -> Result<f64> {
    if y.len() != y_pert.len() {
        return Err(SmxError::Dimension {
            expected: y.len(),
            got: y_pert.len(),
            context: "perturbed predictions",
        });
    }
    if y.is_empty() {
        return Ok(0.0);
    }
    Ok(y.iter().zip(y_pert).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64)
}

/// `(1/m) Σ_i (1/C) Σ_c |p_ic − p_ic^pert|`.
pub fn impact_probabilistic(p: ArrayView2<f64>, p_pert: ArrayView2<f64>) -> Result<f64> {
    if p.dim() != p_pert.dim() {
        return Err(SmxError::Dimension {
            expected: p.nrows(),
            got: p_pert.nrows(),
            context: "perturbed probabilities",
        });
    }
    let (m, c) = p.dim();
    if m == 0 {
        return Ok(0.0);
    }
    let total: f64 = p
        .outer_iter()
        .zip(p_pert.outer_iter())
        .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum::<f64>() / c as f64)
        .sum();
    Ok(total / m as f64)
}

pub(crate) fn check_width(expected: usize, x: ArrayView2<f64>) -> Result<()> {
    if x.ncols() != expected && x.nrows() > 0 {
        return Err(SmxError::Dimension {
            expected,
            got: x.ncols(),
            context: "model input width",
        });
    }
    Ok(())
}

/// A model the CLI can load, fit or launch.
#[derive(Debug)]
pub enum ModelHandle {
    Ridge(RidgeModel),
    Logistic(LogisticModel),
    External(ExternalModel),
}

/// JSON weight dump of the builtin models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelDump {
    Ridge(RidgeModel),
    Logistic(LogisticModel),
}

impl ModelHandle {
    pub fn as_model(&self) -> &dyn SpectralModel {
        match self {
            ModelHandle::Ridge(m) => m,
            ModelHandle::Logistic(m) => m,
            ModelHandle::External(m) => m,
        }
    }

    pub fn backing(&self) -> &'static str {
        match self {
            ModelHandle::Ridge(_) => "builtin-ridge",
            ModelHandle::Logistic(_) => "builtin-logistic",
            ModelHandle::External(_) => "external-subprocess",
        }
    }

    pub fn dump(&self) -> Option<ModelDump> {
        match self {
            ModelHandle::Ridge(m) => Some(ModelDump::Ridge(m.clone())),
            ModelHandle::Logistic(m) => Some(ModelDump::Logistic(m.clone())),
            ModelHandle::External(_) => None,
        }
    }

    pub fn load_dump(path: impl AsRef<Path>) -> Result<ModelHandle> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| SmxError::io(path, e))?;
        Ok(match serde_json::from_str::<ModelDump>(&text)? {
            ModelDump::Ridge(m) => ModelHandle::Ridge(m),
            ModelDump::Logistic(m) => ModelHandle::Logistic(m),
        })
    }
}

impl SpectralModel for ModelHandle {
    fn kind(&self) -> ModelKind {
        self.as_model().kind()
    }

    fn n_features(&self) -> usize {
        self.as_model().n_features()
    }

    fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        self.as_model().predict(x)
    }

    fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.as_model().predict_proba(x)
    }
}

/// Fraction of rows whose predicted class matches `labels`.
pub fn accuracy(model: &dyn SpectralModel, x: ArrayView2<f64>, labels: &[u8]) -> Result<f64> {
    let out = model.outputs(x)?;
    if labels.is_empty() {
        return Ok(0.0);
    }
    let hits = (0..labels.len())
        .filter(|&i| out.predicted_class(i) == labels[i])
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn continuous_impact_examples() {
        assert_eq!(impact_continuous(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(impact_continuous(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 0.5);
        let a = [0.3, -1.2, 4.0];
        let b = [1.3, 0.2, 2.0];
        let base = impact_continuous(&a, &b).unwrap();
        let scaled = impact_continuous(&a.map(|v| -3.0 * v), &b.map(|v| -3.0 * v)).unwrap();
        assert_abs_diff_eq!(scaled, 3.0 * base, epsilon = 1e-12);
    }

    #[test]
    fn probability_shift_examples() {
        let p = array![[0.9, 0.1]];
        assert_eq!(impact_probabilistic(p.view(), p.view()).unwrap(), 0.0);
        let q = array![[0.6, 0.4]];
        assert_abs_diff_eq!(impact_probabilistic(p.view(), q.view()).unwrap(), 0.3, epsilon = 1e-15);
        let a = array![[1.0, 0.0]];
        let b = array![[0.0, 1.0]];
        assert_eq!(impact_probabilistic(a.view(), b.view()).unwrap(), 1.0);
    }

    #[test]
    fn predicted_class_rules() {
        let c = ModelOutputs::Continuous(vec![0.5, 0.51, -2.0]);
        assert_eq!((0..3).map(|i| c.predicted_class(i)).collect::<Vec<_>>(), vec![0, 1, 0]);
        let p = ModelOutputs::Probabilities(array![[0.5, 0.5], [0.2, 0.8]]);
        assert_eq!(p.predicted_class(0), 0);
        assert_eq!(p.predicted_class(1), 1);
    }

    #[test]
    fn dump_round_trip() {
        let h = ModelHandle::Ridge(RidgeModel::from_weights(vec![1.0, -2.0], 0.5));
        let dump = h.dump().unwrap();
        let s = serde_json::to_string(&dump).unwrap();
        assert!(s.starts_with(r#"{"kind":"ridge""#));
        assert_eq!(serde_json::from_str::<ModelDump>(&s).unwrap(), dump);
    }
}
