use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{check_width, ModelKind, SpectralModel};
use crate::dataio::SpectralDataset;
use crate::error::{Result, SmxError};

/// Binary logistic regression; probabilistic output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    #[serde(default)]
    pub iterations: usize,
    #[serde(default)]
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticOptions {
    pub l2: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions {
            l2: 1e-2,
            max_iters: 5000,
            tol: 1e-6,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl LogisticModel {
    pub fn from_weights(weights: Vec<f64>, intercept: f64) -> Self {
        LogisticModel {
            weights,
            intercept,
            iterations: 0,
            converged: true,
        }
    }

    fn logit(&self, row: ArrayView1<f64>) -> f64 {
        self.intercept + row.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>()
    }
}

impl SpectralModel for LogisticModel {
    fn kind(&self) -> ModelKind {
        ModelKind::Probabilistic
    }

    fn n_features(&self) -> usize {
        self.weights.len()
    }

    fn predict(&self, _x: ArrayView2<f64>) -> Result<Vec<f64>> {
        Err(SmxError::Model("logistic model is probabilistic; use predict_proba".into()))
    }

    fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        check_width(self.weights.len(), x)?;
        let mut out = Array2::zeros((x.nrows(), 2));
        for (i, row) in x.outer_iter().enumerate() {
            let p1 = sigmoid(self.logit(row));
            out[[i, 0]] = 1.0 - p1;
            out[[i, 1]] = p1;
        }
        Ok(out)
    }
}

/// Mean log-loss plus `(l2 / 2)·‖w‖²`; the intercept is not penalised.
#[derive(Debug, Clone, Copy)]
pub struct LogisticObjective<'a> {
    pub x: ArrayView2<'a, f64>,
    pub y: &'a [f64],
    pub l2: f64,
}

impl LogisticObjective<'_> {
    pub fn loss(&self, w: ArrayView1<f64>, b: f64) -> f64 {
        let z = self.x.dot(&w) + b;
        let n = self.y.len() as f64;
        let data: f64 = z.iter().zip(self.y).map(|(&z, &y)| softplus(z) - y * z).sum::<f64>() / n;
        data + 0.5 * self.l2 * w.dot(&w)
    }

    /// Loss and gradient `(∂/∂w, ∂/∂b)`.
    pub fn loss_and_grad(&self, w: ArrayView1<f64>, b: f64) -> (f64, Array1<f64>, f64) {
        let z = self.x.dot(&w) + b;
        let n = self.y.len() as f64;
        let mut resid = Array1::zeros(z.len());
        let mut data = 0.0;
        for (k, (&zi, &yi)) in z.iter().zip(self.y).enumerate() {
            data += softplus(zi) - yi * zi;
            resid[k] = sigmoid(zi) - yi;
        }
        let loss = data / n + 0.5 * self.l2 * w.dot(&w);
        let gw = self.x.t().dot(&resid) / n + &w * self.l2;
        let gb = resid.sum() / n;
        (loss, gw, gb)
    }
}

/// Diagonally preconditioned gradient descent with backtracking line
/// search, starting from zero weights. The preconditioner is the diagonal
/// curvature bound `0.25·mean(x_j²) + l2` (and `0.25` for the intercept).
pub fn fit_logistic(train: &SpectralDataset, opts: LogisticOptions) -> Result<LogisticModel> {
    if !(opts.l2 >= 0.0 && opts.l2.is_finite()) {
        return Err(SmxError::Config(format!("l2 must be >= 0, got {}", opts.l2)));
    }
    if !(opts.tol > 0.0) {
        return Err(SmxError::Config(format!("tol must be > 0, got {}", opts.tol)));
    }
    train.require_both_classes()?;
    let y: Vec<f64> = train.labels.iter().map(|&l| l as f64).collect();
    let obj = LogisticObjective {
        x: train.intensities.view(),
        y: &y,
        l2: opts.l2,
    };
    let n = train.n_samples() as f64;
    let p = train.n_variables();
    let precond: Array1<f64> = Array1::from_shape_fn(p, |j| {
        let ms = train.intensities.column(j).iter().map(|v| v * v).sum::<f64>() / n;
        (0.25 * ms + opts.l2).max(1e-12)
    });
    let precond_b = 0.25;

    let mut w = Array1::zeros(p);
    let mut b = 0.0;
    let mut step = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    let overflow = || SmxError::Numerical("logistic loss became non-finite; increase l2".into());
    while iterations < opts.max_iters {
        let (loss, gw, gb) = obj.loss_and_grad(w.view(), b);
        if !loss.is_finite() {
            return Err(overflow());
        }
        if (gw.dot(&gw) + gb * gb).sqrt() < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let dw = &gw / &precond;
        let db = gb / precond_b;
        let decrease = gw.dot(&dw) + gb * db;
        loop {
            let w_new = &w - &(&dw * step);
            let b_new = b - step * db;
            let trial = obj.loss(w_new.view(), b_new);
            if trial.is_finite() && trial <= loss - 0.5 * step * decrease {
                w = w_new;
                b = b_new;
                break;
            }
            step *= 0.5;
            if step < 1e-30 {
                return Err(overflow());
            }
        }
        step = (step * 2.0).min(1.0);
    }
    Ok(LogisticModel {
        weights: w.to_vec(),
        intercept: b,
        iterations,
        converged,
    })
}
