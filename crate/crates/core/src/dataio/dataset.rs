use std::collections::HashSet;

use ndarray::{Array2, Axis};

use crate::error::{Result, SmxError};

/// A sample-by-variable intensity matrix with its spectral axis, binary
/// labels and sample ids.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDataset {
    pub axis: Vec<f64>,
    pub intensities: Array2<f64>,
    pub labels: Vec<u8>,
    pub sample_ids: Vec<String>,
}

impl SpectralDataset {
    /// Builds a dataset and checks every structural invariant.
    pub fn new(
        axis: Vec<f64>,
        intensities: Array2<f64>,
        labels: Vec<u8>,
        sample_ids: Vec<String>,
    ) -> Result<Self> {
        let ds = SpectralDataset {
            axis,
            intensities,
            labels,
            sample_ids,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, p) = self.intensities.dim();
        if self.axis.len() != p {
            return Err(SmxError::Dimension {
                expected: p,
                got: self.axis.len(),
                context: "axis length vs intensity columns",
            });
        }
        if let Some(w) = self.axis.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(SmxError::Format(format!(
                "axis not strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if self.axis.iter().any(|a| !a.is_finite()) {
            return Err(SmxError::Format("axis contains non-finite values".into()));
        }
        if self.labels.len() != n || self.sample_ids.len() != n {
            return Err(SmxError::Dimension {
                expected: n,
                got: self.labels.len().min(self.sample_ids.len()),
                context: "labels/sample ids vs rows",
            });
        }
        if let Some(l) = self.labels.iter().find(|&&l| l > 1) {
            return Err(SmxError::Format(format!("label {l} is not 0 or 1")));
        }
        if let Some(((i, j), _)) = self
            .intensities
            .indexed_iter()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(SmxError::Format(format!(
                "non-finite intensity at row {i}, column {j}"
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &self.sample_ids {
            if !seen.insert(id.as_str()) {
                return Err(SmxError::Format(format!("duplicate sample id '{id}'")));
            }
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        self.intensities.nrows()
    }

    pub fn n_variables(&self) -> usize {
        self.intensities.ncols()
    }

    /// Rows `idx`, in the given order.
    pub fn subset(&self, idx: &[usize]) -> SpectralDataset {
        SpectralDataset {
            axis: self.axis.clone(),
            intensities: self.intensities.select(Axis(0), idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            sample_ids: idx.iter().map(|&i| self.sample_ids[i].clone()).collect(),
        }
    }

    /// Row indices of each class, in dataset order.
    pub fn class_indices(&self) -> [Vec<usize>; 2] {
        let mut out = [Vec::new(), Vec::new()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    /// Errors unless both classes are present.
    pub fn require_both_classes(&self) -> Result<()> {
        let [a, b] = self.class_indices();
        if a.is_empty() || b.is_empty() {
            return Err(SmxError::Config(
                "both classes (0 and 1) must be present".into(),
            ));
        }
        Ok(())
    }

    pub fn with_intensities(&self, intensities: Array2<f64>) -> SpectralDataset {
        SpectralDataset {
            axis: self.axis.clone(),
            intensities,
            labels: self.labels.clone(),
            sample_ids: self.sample_ids.clone(),
        }
    }
}
