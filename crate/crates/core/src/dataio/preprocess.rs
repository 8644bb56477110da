use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::savgol::savgol_smooth;
use super::SpectralDataset;
use crate::error::{Result, SmxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavgolParams {
    pub window: usize,
    pub order: usize,
}

/// Which transform to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum PreprocessMethod {
    MeanCenter,
    PoissonThenCenter,
    SavgolThenCenter { window: usize, order: usize },
}

impl PreprocessMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PreprocessMethod::MeanCenter => "mean_center",
            PreprocessMethod::PoissonThenCenter => "poisson_then_center",
            PreprocessMethod::SavgolThenCenter { .. } => "savgol_then_center",
        }
    }
}

/// Parameters fitted on a training set and reused on any other split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessState {
    pub method: String,
    pub column_means: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson_scales: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub savgol: Option<SavgolParams>,
}

impl PreprocessState {
    pub fn validate(&self) -> Result<()> {
        let p = self.column_means.len();
        match self.method.as_str() {
            "mean_center" => {
                if self.poisson_scales.is_some() || self.savgol.is_some() {
                    return Err(SmxError::Config(
                        "mean_center state carries extra parameters".into(),
                    ));
                }
            }
            "poisson_then_center" => {
                let scales = self.poisson_scales.as_ref().ok_or_else(|| {
                    SmxError::Config("poisson_then_center state lacks poisson_scales".into())
                })?;
                if scales.len() != p {
                    return Err(SmxError::Dimension {
                        expected: p,
                        got: scales.len(),
                        context: "poisson scales",
                    });
                }
                if let Some(j) = scales.iter().position(|&s| !(s > 0.0 && s.is_finite())) {
                    return Err(SmxError::Config(format!(
                        "poisson scale of column {j} must be > 0"
                    )));
                }
                if self.savgol.is_some() {
                    return Err(SmxError::Config(
                        "poisson_then_center state carries savgol parameters".into(),
                    ));
                }
            }
            "savgol_then_center" => {
                let sg = self.savgol.ok_or_else(|| {
                    SmxError::Config("savgol_then_center state lacks savgol".into())
                })?;
                if sg.window % 2 == 0 || sg.order >= sg.window {
                    return Err(SmxError::Config(format!(
                        "savgol needs odd window and order < window (got {}, {})",
                        sg.window, sg.order
                    )));
                }
                if self.poisson_scales.is_some() {
                    return Err(SmxError::Config(
                        "savgol_then_center state carries poisson scales".into(),
                    ));
                }
            }
            other => {
                return Err(SmxError::Config(format!(
                    "unknown preprocessing method '{other}'"
                )))
            }
        }
        Ok(())
    }

    /// Maps a preprocessed value in column `j` back to input units.
    /// Smoothing is not inverted: for Savitzky–Golay the result is in
    /// smoothed input units.
    pub fn to_input_units(&self, j: usize, value: f64) -> f64 {
        let centred = value + self.column_means[j];
        match &self.poisson_scales {
            Some(s) => centred * s[j],
            None => centred,
        }
    }
}

/// Fits column statistics (and Poisson scales) on `ds` only.
pub fn fit_preprocess(ds: &SpectralDataset, method: PreprocessMethod) -> Result<PreprocessState> {
    if ds.n_samples() == 0 {
        return Err(SmxError::Config("cannot fit preprocessing on an empty dataset".into()));
    }
    let (poisson_scales, savgol) = match method {
        PreprocessMethod::MeanCenter => (None, None),
        PreprocessMethod::PoissonThenCenter => {
            let raw_means = column_means(&ds.intensities);
            if let Some(j) = raw_means.iter().position(|&m| !(m > 0.0)) {
                return Err(SmxError::Config(format!(
                    "poisson scaling needs positive column means; column {j} (axis {}) has mean {}",
                    ds.axis[j], raw_means[j]
                )));
            }
            (Some(raw_means.iter().map(|m| m.sqrt()).collect()), None)
        }
        PreprocessMethod::SavgolThenCenter { window, order } => {
            (None, Some(SavgolParams { window, order }))
        }
    };
    let mut state = PreprocessState {
        method: method.name().to_string(),
        column_means: vec![0.0; ds.n_variables()],
        poisson_scales,
        savgol,
    };
    state.validate()?;
    let transformed = transform_uncentred(&state, &ds.intensities)?;
    state.column_means = column_means(&transformed);
    Ok(state)
}

/// Applies a fitted state; never looks at statistics of `ds` itself.
pub fn apply_preprocess(state: &PreprocessState, ds: &SpectralDataset) -> Result<SpectralDataset> {
    state.validate()?;
    if ds.n_variables() != state.column_means.len() {
        return Err(SmxError::Dimension {
            expected: state.column_means.len(),
            got: ds.n_variables(),
            context: "preprocess state vs dataset width",
        });
    }
    let mut x = transform_uncentred(state, &ds.intensities)?;
    for mut row in x.rows_mut() {
        for (v, m) in row.iter_mut().zip(&state.column_means) {
            *v -= m;
        }
    }
    Ok(ds.with_intensities(x))
}

fn transform_uncentred(state: &PreprocessState, x: &Array2<f64>) -> Result<Array2<f64>> {
    let mut out = x.clone();
    if let Some(scales) = &state.poisson_scales {
        for mut row in out.rows_mut() {
            for (v, s) in row.iter_mut().zip(scales) {
                *v /= s;
            }
        }
    }
    if let Some(sg) = state.savgol {
        for mut row in out.rows_mut() {
            let smoothed = savgol_smooth(&row.to_vec(), sg.window, sg.order)?;
            row.assign(&ndarray::ArrayView1::from(&smoothed));
        }
    }
    Ok(out)
}

fn column_means(x: &Array2<f64>) -> Vec<f64> {
    x.mean_axis(Axis(0))
        .map(|m| m.to_vec())
        .unwrap_or_else(|| vec![0.0; x.ncols()])
}
