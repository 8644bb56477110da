use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SmxError};

/// Centre-point smoothing weights for a window of `window` points and a
/// fitted polynomial of degree `order`.
pub(crate) fn savgol_coefficients(window: usize, order: usize) -> Result<Vec<f64>> {
    if window.is_multiple_of(2) || window < 3 {
        return Err(SmxError::Config(format!(
            "Savitzky-Golay window must be odd and >= 3, got {window}"
        )));
    }
    if order >= window {
        return Err(SmxError::Config(format!(
            "Savitzky-Golay order {order} must be below window {window}"
        )));
    }
    let half = (window / 2) as f64;
    let vander = DMatrix::from_fn(window, order + 1, |i, j| (i as f64 - half).powi(j as i32));
    let gram = vander.transpose() * &vander;
    let chol = gram
        .cholesky()
        .ok_or_else(|| SmxError::Numerical("Savitzky-Golay normal matrix not SPD".into()))?;
    // First row of (AᵀA)⁻¹Aᵀ: solve (AᵀA) e = e₀ then project.
    let mut e0 = DVector::zeros(order + 1);
    e0[0] = 1.0;
    let sol = chol.solve(&e0);
    Ok((&vander * sol).iter().copied().collect())
}

/// Smooths one row with mirror padding (`d c b | a b c d`), so the output
/// keeps the input length.
pub fn savgol_smooth(row: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    let coef = savgol_coefficients(window, order)?;
    let half = window / 2;
    let p = row.len();
    if p <= half {
        return Err(SmxError::Config(format!(
            "Savitzky-Golay window {window} too wide for {p} variables"
        )));
    }
    let at = |k: isize| -> f64 {
        let last = p as isize - 1;
        let idx = if k < 0 {
            -k
        } else if k > last {
            2 * last - k
        } else {
            k
        };
        row[idx as usize]
    };
    Ok((0..p)
        .map(|j| {
            coef.iter()
                .enumerate()
                .map(|(t, c)| c * at(j as isize + t as isize - half as isize))
                .sum()
        })
        .collect())
}
