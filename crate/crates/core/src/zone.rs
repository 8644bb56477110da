//! Per-zone one-component PCA: loading, scores, explained variance and
//! back-projection of score thresholds into spectral space.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::dataio::ZoneIndices;
use crate::error::{Result, SmxError};
use crate::exec::Execution;

/// Zones up to this width use a full symmetric eigen-decomposition.
pub const DENSE_EIGEN_MAX_DIM: usize = 64;
const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITERS: usize = 1000;
const SIGN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneModel {
    pub zone_name: String,
    pub indices: Vec<usize>,
    pub mean: Vec<f64>,
    pub loading: Vec<f64>,
    pub variance_explained: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpectrum {
    pub zone_name: String,
    pub tau: f64,
    pub profile: Vec<f64>,
}

impl ZoneModel {
    /// Fits PC1 of `x_zone` (n × d, the zone's columns only).
    pub fn fit(zone_name: &str, indices: Vec<usize>, x_zone: ArrayView2<f64>) -> Result<Self> {
        let (n, d) = x_zone.dim();
        if n < 2 || d < 2 {
            return Err(SmxError::Config(format!(
                "zone '{zone_name}' needs at least 2 samples and 2 variables (got {n} x {d})"
            )));
        }
        if indices.len() != d {
            return Err(SmxError::Dimension {
                expected: d,
                got: indices.len(),
                context: "zone indices vs zone columns",
            });
        }
        let mean = x_zone.mean_axis(Axis(0)).expect("n >= 2");
        let centred = &x_zone - &mean;
        let denom = (n - 1) as f64;
        let total: f64 = centred.iter().map(|v| v * v).sum::<f64>() / denom;
        if !(total > 0.0) {
            return Err(SmxError::DegenerateZone(zone_name.to_string()));
        }

        let (lambda, mut loading) = if d <= DENSE_EIGEN_MAX_DIM {
            let cov = centred.t().dot(&centred) / denom;
            top_eigenpair_dense(&cov, zone_name)?
        } else {
            match top_eigenpair_power(centred.view(), denom) {
                Ok(pair) => pair,
                Err(residual) => {
                    log::warn!(
                        "power iteration for zone '{zone_name}' stalled (residual {residual:.2e}); \
                         using full eigen-decomposition"
                    );
                    let cov = centred.t().dot(&centred) / denom;
                    top_eigenpair_dense(&cov, zone_name)?
                }
            }
        };
        apply_sign_convention(&mut loading);
        Ok(ZoneModel {
            zone_name: zone_name.to_string(),
            indices,
            mean: mean.to_vec(),
            loading,
            variance_explained: (lambda / total).clamp(0.0, 1.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// `t_i = (x_i − mean)ᵀ loading` for each row of `x_zone`.
    pub fn score(&self, x_zone: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x_zone.ncols() != self.dim() {
            return Err(SmxError::Dimension {
                expected: self.dim(),
                got: x_zone.ncols(),
                context: "zone columns for scoring",
            });
        }
        Ok(x_zone.outer_iter().map(|row| self.score_row(row)).collect())
    }

    /// Scores rows of a full-width matrix by selecting the zone's columns.
    pub fn score_full(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if let Some(&max) = self.indices.iter().max() {
            if max >= x.ncols() {
                return Err(SmxError::Dimension {
                    expected: max + 1,
                    got: x.ncols(),
                    context: "matrix width for zone scoring",
                });
            }
        }
        Ok(x.outer_iter()
            .map(|row| {
                self.indices
                    .iter()
                    .zip(&self.mean)
                    .zip(&self.loading)
                    .map(|((&j, m), w)| (row[j] - m) * w)
                    .sum()
            })
            .collect())
    }

    fn score_row(&self, row: ArrayView1<f64>) -> f64 {
        row.iter()
            .zip(&self.mean)
            .zip(&self.loading)
            .map(|((x, m), w)| (x - m) * w)
            .sum()
    }

    /// The spectral profile `mean + tau · loading` that scores exactly `tau`.
    pub fn threshold_spectrum(&self, tau: f64) -> ThresholdSpectrum {
        ThresholdSpectrum {
            zone_name: self.zone_name.clone(),
            tau,
            profile: self
                .mean
                .iter()
                .zip(&self.loading)
                .map(|(m, w)| m + tau * w)
                .collect(),
        }
    }
}

/// Fits every zone of `x` (possibly concurrently), in zone order.
pub fn fit_zones(x: ArrayView2<f64>, zones: &[ZoneIndices], exec: Execution) -> Result<Vec<ZoneModel>> {
    exec.try_map(zones.len(), |m| {
        let z = &zones[m];
        let sub = x.select(Axis(1), &z.indices);
        ZoneModel::fit(&z.name, z.indices.clone(), sub.view())
    })
}

/// n × M score matrix, one column per zone model.
pub fn score_matrix(models: &[ZoneModel], x: ArrayView2<f64>) -> Result<Array2<f64>> {
    let mut t = Array2::zeros((x.nrows(), models.len()));
    for (m, model) in models.iter().enumerate() {
        let s = model.score_full(x)?;
        t.column_mut(m).assign(&ArrayView1::from(&s));
    }
    Ok(t)
}

/// Sum of entries non-negative; when that sum is zero, the first
/// non-zero entry is positive.
pub(crate) fn apply_sign_convention(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    let flip = if s.abs() > SIGN_EPS {
        s < 0.0
    } else {
        v.iter()
            .find(|x| x.abs() > SIGN_EPS)
            .is_some_and(|&x| x < 0.0)
    };
    if flip {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Largest eigenpair of a symmetric matrix via cyclic Jacobi rotations.
/// Among equal eigenvalues the lowest diagonal position wins.
fn top_eigenpair_dense(a: &Array2<f64>, zone: &str) -> Result<(f64, Vec<f64>)> {
    let (values, vectors) = jacobi_eigen(a).map_err(|residual| SmxError::NoConvergence {
        zone: zone.to_string(),
        residual,
    })?;
    let mut best = 0;
    for k in 1..values.len() {
        if values[k] > values[best] {
            best = k;
        }
    }
    let mut v = vectors.column(best).to_vec();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    Ok((values[best], v))
}

/// Eigenvalues and column eigenvectors of a symmetric matrix. On failure
/// returns the remaining off-diagonal norm.
pub(crate) fn jacobi_eigen(a: &Array2<f64>) -> std::result::Result<(Vec<f64>, Array2<f64>), f64> {
    let d = a.nrows();
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(d);
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok((vec![0.0; d], v));
    }
    let off = |a: &Array2<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    s += a[[i, j]] * a[[i, j]];
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..100 {
        if off(&a) <= 1e-15 * scale {
            return Ok(((0..d).map(|i| a[[i, i]]).collect(), v));
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[[p, q]];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..d {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let residual = off(&a);
    if residual <= 1e-12 * scale {
        Ok(((0..d).map(|i| a[[i, i]]).collect(), v))
    } else {
        Err(residual)
    }
}

/// Power iteration on `Xcᵀ Xc / denom` without forming the covariance.
/// On failure returns the final eigen-residual.
fn top_eigenpair_power(
    centred: ArrayView2<f64>,
    denom: f64,
) -> std::result::Result<(f64, Vec<f64>), f64> {
    let d = centred.ncols();
    let apply = |v: &ndarray::Array1<f64>| centred.t().dot(&centred.dot(v)) / denom;
    let mut v = ndarray::Array1::from_shape_fn(d, |j| 1.0 + j as f64 / d as f64);
    v /= v.dot(&v).sqrt();
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_MAX_ITERS {
        let w = apply(&v);
        let lambda = v.dot(&w);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            return Err(f64::INFINITY);
        }
        let next = &w / norm;
        let r = &w - &(&v * lambda);
        residual = r.dot(&r).sqrt() / lambda.abs().max(f64::MIN_POSITIVE);
        let step = (&next - &v).mapv(f64::abs).iter().cloned().fold(0.0, f64::max);
        v = next;
        if residual < POWER_TOL || step < POWER_TOL {
            let lambda = v.dot(&apply(&v));
            return Ok((lambda, v.to_vec()));
        }
    }
    Err(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn fit(x: Array2<f64>) -> ZoneModel {
        let d = x.ncols();
        ZoneModel::fit("z", (0..d).collect(), x.view()).unwrap()
    }

    #[test]
    fn diagonal_line() {
        let m = fit(array![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(m.loading[0], r, epsilon = 1e-12);
        assert_abs_diff_eq!(m.loading[1], r, epsilon = 1e-12);
        assert_abs_diff_eq!(m.variance_explained, 1.0, epsilon = 1e-9);
        let s = m.score(array![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]].view()).unwrap();
        let sq2 = 2f64.sqrt();
        for (a, b) in s.iter().zip([-sq2, 0.0, sq2]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn variance_on_first_axis() {
        let m = fit(array![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        assert_abs_diff_eq!(m.loading[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.loading[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.variance_explained, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn isotropic_cloud_has_half_variance() {
        let m = fit(array![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]);
        assert_abs_diff_eq!(m.variance_explained, 0.5, epsilon = 1e-12);
        assert_eq!(m.loading, vec![1.0, 0.0]);
    }

    #[test]
    fn degenerate_zone_is_an_error() {
        let err = ZoneModel::fit("flat", vec![0, 1], array![[1.0, 2.0], [1.0, 2.0]].view()).unwrap_err();
        assert!(matches!(err, SmxError::DegenerateZone(ref z) if z == "flat"));
    }

    #[test]
    fn score_of_mean_and_unit_step() {
        let m = fit(array![[0.0, 1.0, 3.0], [2.0, 0.5, 1.0], [1.0, 4.0, 2.0], [5.0, 2.0, 0.0]]);
        let mean = ndarray::Array1::from(m.mean.clone());
        let at_mean = m.score(mean.view().insert_axis(Axis(0))).unwrap();
        assert_abs_diff_eq!(at_mean[0], 0.0, epsilon = 1e-12);
        let plus = &mean + &ndarray::Array1::from(m.loading.clone());
        let s = m.score(plus.view().insert_axis(Axis(0))).unwrap();
        assert_abs_diff_eq!(s[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn threshold_spectrum_identities() {
        let m = fit(array![[0.0, 1.0], [2.0, 0.5], [1.0, 4.0]]);
        assert_eq!(m.threshold_spectrum(0.0).profile, m.mean);
        let one = m.threshold_spectrum(1.0);
        for ((p, mu), w) in one.profile.iter().zip(&m.mean).zip(&m.loading) {
            assert_abs_diff_eq!(p - mu, *w, epsilon = 1e-15);
        }
    }

    #[test]
    fn sign_convention_tie_uses_first_nonzero() {
        let mut v = vec![0.0, -0.5, 0.5];
        apply_sign_convention(&mut v);
        assert_eq!(v, vec![0.0, 0.5, -0.5]);
        let mut v = vec![-0.6, -0.8];
        apply_sign_convention(&mut v);
        assert_eq!(v, vec![0.6, 0.8]);
    }

    #[test]
    fn power_iteration_agrees_with_dense_path() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 40;
        let d = 80;
        let direction: Vec<f64> = (0..d).map(|j| ((j as f64) / 9.0).sin()).collect();
        let x = Array2::from_shape_fn((n, d), |(i, j)| {
            (i as f64 - 20.0) * 0.3 * direction[j] + 0.05 * rng.random_range(-1.0..1.0)
        });
        let m = ZoneModel::fit("wide", (0..d).collect(), x.view()).unwrap();
        let centred = &x - &x.mean_axis(Axis(0)).unwrap();
        let cov = centred.t().dot(&centred) / (n as f64 - 1.0);
        let (lambda, mut dense) = top_eigenpair_dense(&cov, "wide").unwrap();
        apply_sign_convention(&mut dense);
        for (a, b) in m.loading.iter().zip(&dense) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-7);
        }
        let trace: f64 = (0..d).map(|j| cov[[j, j]]).sum();
        assert_abs_diff_eq!(m.variance_explained, lambda / trace, epsilon = 1e-9);
    }

    #[test]
    fn refits_are_bit_identical() {
        let x = array![[0.3, 1.0, 3.0], [2.0, 0.5, 1.0], [1.0, 4.0, 2.2], [5.0, 2.0, 0.1]];
        assert_eq!(fit(x.clone()), fit(x));
    }

    proptest::proptest! {
        #[test]
        fn matches_eigen_oracle(n in 3usize..30, d in 2usize..8, vals in proptest::collection::vec(-5.0f64..5.0, 240)) {
            let x = Array2::from_shape_fn((n, d), |(i, j)| vals[i * 8 + j] * (1.0 + j as f64));
            let m = fit(x.clone());
            let c = &x - &x.mean_axis(Axis(0)).unwrap();
            let cov = nalgebra::DMatrix::from_fn(d, d, |a, b| c.column(a).dot(&c.column(b)) / (n - 1) as f64);
            let eig = nalgebra::SymmetricEigen::new(cov.clone());
            let top = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            proptest::prop_assert!((top / cov.trace() - m.variance_explained).abs() < 1e-8);
            let v = nalgebra::DVector::from_vec(m.loading.clone());
            proptest::prop_assert!((v.norm() - 1.0).abs() < 1e-10);
            // the loading is an eigenvector for the top eigenvalue
            proptest::prop_assert!((&cov * &v - &v * top).norm() < 1e-7 * top.max(1.0));
            proptest::prop_assert!(m.loading.iter().sum::<f64>() >= -SIGN_EPS);
        }
    }
}
