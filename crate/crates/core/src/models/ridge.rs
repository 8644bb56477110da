use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::{check_width, ModelKind, SpectralModel};
use crate::dataio::SpectralDataset;
use crate::error::{Result, SmxError};

/// Linear model with intercept; continuous output on 0/1-coded labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl RidgeModel {
    pub fn from_weights(weights: Vec<f64>, intercept: f64) -> Self {
        RidgeModel { weights, intercept }
    }
}

impl SpectralModel for RidgeModel {
    fn kind(&self) -> ModelKind {
        ModelKind::Continuous
    }

    fn n_features(&self) -> usize {
        self.weights.len()
    }

    fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        check_width(self.weights.len(), x)?;
        Ok(x.outer_iter()
            .map(|row| {
                self.intercept + row.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>()
            })
            .collect())
    }

    fn predict_proba(&self, _x: ArrayView2<f64>) -> Result<Array2<f64>> {
        Err(SmxError::Model("ridge model is continuous; use predict".into()))
    }
}

/// Solves `(XcᵀXc + λI) w = Xcᵀ yc` on centred features and labels; the
/// intercept restores the means.
pub fn fit_ridge(train: &SpectralDataset, lambda: f64) -> Result<RidgeModel> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(SmxError::Config(format!("ridge lambda must be >= 0, got {lambda}")));
    }
    train.require_both_classes()?;
    let x = &train.intensities;
    let (n, p) = x.dim();
    let y: Vec<f64> = train.labels.iter().map(|&l| l as f64).collect();
    let x_mean = x.mean_axis(Axis(0)).expect("non-empty");
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let xc = x - &x_mean;
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    let gram = xc.t().dot(&xc);
    let mut a = DMatrix::from_fn(p, p, |i, j| gram[[i, j]]);
    for i in 0..p {
        a[(i, i)] += lambda;
    }
    let rhs = DVector::from_iterator(
        p,
        (0..p).map(|j| xc.column(j).iter().zip(&yc).map(|(u, v)| u * v).sum::<f64>()),
    );
    let max_diag = (0..p).map(|i| a[(i, i)]).fold(0.0, f64::max);
    let singular = || {
        SmxError::Numerical(format!(
            "ridge system is singular at lambda = {lambda}; use lambda > 0"
        ))
    };
    let chol = a.clone().cholesky().ok_or_else(singular)?;
    let min_pivot = (0..p).map(|i| chol.l()[(i, i)].powi(2)).fold(f64::INFINITY, f64::min);
    if max_diag == 0.0 || min_pivot < 1e-12 * max_diag {
        return Err(singular());
    }
    let w = chol.solve(&rhs);
    let weights: Vec<f64> = w.iter().copied().collect();
    let intercept = y_mean - x_mean.iter().zip(&weights).map(|(m, w)| m * w).sum::<f64>();
    Ok(RidgeModel { weights, intercept })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn dataset(x: Array2<f64>, labels: Vec<u8>) -> SpectralDataset {
        let (n, p) = x.dim();
        SpectralDataset::new(
            (0..p).map(|j| j as f64).collect(),
            x,
            labels,
            (0..n).map(|i| format!("s{i}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_weights_predict_intercept() {
        let m = RidgeModel::from_weights(vec![0.0; 3], 0.25);
        assert_eq!(m.predict(array![[1.0, 2.0, 3.0], [9.0, 9.0, 9.0]].view()).unwrap(), vec![0.25, 0.25]);
    }

    #[test]
    fn empty_batch_is_fine() {
        let m = RidgeModel::from_weights(vec![1.0; 3], 0.0);
        assert!(m.predict(Array2::zeros((0, 3)).view()).unwrap().is_empty());
    }

    #[test]
    fn exact_fit_on_two_points() {
        let m = fit_ridge(&dataset(array![[0.0], [1.0]], vec![0, 1]), 0.0).unwrap();
        let p = m.predict(array![[0.0], [1.0]].view()).unwrap();
        assert_abs_diff_eq!(p[0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn heavy_shrinkage_predicts_label_mean() {
        let ds = dataset(array![[0.0, 1.0], [1.0, 3.0], [2.0, 2.0], [5.0, 0.0]], vec![0, 1, 1, 1]);
        let m = fit_ridge(&ds, 1e12).unwrap();
        for v in m.predict(ds.intensities.view()).unwrap() {
            assert_abs_diff_eq!(v, 0.75, epsilon = 1e-9);
        }
    }

    #[test]
    fn duplicate_features_are_resolved_by_regularisation() {
        let ds = dataset(array![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]], vec![0, 0, 1, 1]);
        assert!(fit_ridge(&ds, 0.0).is_err());
        let m = fit_ridge(&ds, 1.0).unwrap();
        // Closed form: sxx = 5, sxy = 2 per feature, so w = 2 / (2·5 + 1).
        assert_abs_diff_eq!(m.weights[0], 2.0 / 11.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.weights[1], m.weights[0], epsilon = 1e-12);
    }

    #[test]
    fn matches_augmented_normal_equations() {
        // Oracle: penalised least squares with unpenalised intercept, solved
        // on the uncentred augmented design by LU.
        let ds = dataset(
            array![[0.1, 2.0, -1.0], [1.0, 0.3, 0.0], [2.5, 1.0, 1.0], [0.7, -0.4, 2.0], [1.9, 1.1, 0.2]],
            vec![0, 1, 1, 0, 1],
        );
        let lambda = 0.7;
        let m = fit_ridge(&ds, lambda).unwrap();
        let (n, p) = ds.intensities.dim();
        let mut design = DMatrix::from_element(n, p + 1, 1.0);
        for i in 0..n {
            for j in 0..p {
                design[(i, j + 1)] = ds.intensities[[i, j]];
            }
        }
        let mut lhs = design.transpose() * &design;
        for j in 1..=p {
            lhs[(j, j)] += lambda;
        }
        let y = DVector::from_iterator(n, ds.labels.iter().map(|&l| l as f64));
        let beta = lhs.lu().solve(&(design.transpose() * y)).unwrap();
        assert_abs_diff_eq!(m.intercept, beta[0], epsilon = 1e-9);
        for j in 0..p {
            assert_abs_diff_eq!(m.weights[j], beta[j + 1], epsilon = 1e-9);
        }
        let fitted = &design * &beta;
        let pred = m.predict(ds.intensities.view()).unwrap();
        for i in 0..n {
            assert_abs_diff_eq!(pred[i], fitted[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn width_mismatch() {
        let m = RidgeModel::from_weights(vec![1.0; 3], 0.0);
        assert!(m.predict(array![[1.0, 2.0]].view()).is_err());
        assert!(m.predict_proba(array![[1.0, 2.0, 3.0]].view()).is_err());
    }
}
