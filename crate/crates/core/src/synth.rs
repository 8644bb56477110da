//! Two-class synthetic spectra: Gaussian peaks with per-sample random
//! amplitude and width, plus white noise.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataio::{SpectralDataset, Zone, ZoneConfig};
use crate::error::{Result, SmxError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSpec {
    pub center: f64,
    pub amplitude_mean: f64,
    pub amplitude_std: f64,
    pub width_mean: f64,
    pub width_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    /// Prefix of generated sample ids, e.g. `"A"` gives `A_0001`.
    pub name: String,
    pub label: u8,
    pub n_samples: usize,
    pub noise_std: f64,
    pub peaks: Vec<PeakSpec>,
}

/// Missing fields in a JSON config take the reference benchmark values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub n_points: usize,
    pub axis_range: (f64, f64),
    pub classes: Vec<ClassSpec>,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    /// The reference benchmark: 116 + 126 samples on 300 points over
    /// `[1, 600]`, peaks at 150, 300 and 500.
    fn default() -> Self {
        let peak = |c, a, sa, w, sw| PeakSpec {
            center: c,
            amplitude_mean: a,
            amplitude_std: sa,
            width_mean: w,
            width_std: sw,
        };
        SyntheticConfig {
            n_points: 300,
            axis_range: (1.0, 600.0),
            classes: vec![
                ClassSpec {
                    name: "A".into(),
                    label: 1,
                    n_samples: 116,
                    noise_std: 0.08,
                    peaks: vec![
                        peak(150.0, 2.50, 0.30, 15.0, 2.0),
                        peak(300.0, 2.00, 0.30, 15.0, 2.0),
                        peak(500.0, 0.50, 0.30, 15.0, 2.0),
                    ],
                },
                ClassSpec {
                    name: "B".into(),
                    label: 0,
                    n_samples: 126,
                    noise_std: 0.10,
                    peaks: vec![
                        peak(150.0, 0.10, 0.005, 15.0, 2.0),
                        peak(300.0, 0.80, 0.30, 14.0, 1.5),
                        peak(500.0, 0.45, 0.30, 15.0, 2.0),
                    ],
                },
            ],
            seed: 42,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SmxError::Config(m));
        if self.n_points < 2 {
            return bad(format!("n_points must be >= 2, got {}", self.n_points));
        }
        let (lo, hi) = self.axis_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad(format!("axis_range must satisfy low < high, got ({lo}, {hi})"));
        }
        if self.classes.len() != 2 {
            return bad(format!("exactly two classes required, got {}", self.classes.len()));
        }
        let labels: Vec<u8> = self.classes.iter().map(|c| c.label).collect();
        if !(labels.contains(&0) && labels.contains(&1)) {
            return bad("class labels must be 0 and 1".into());
        }
        if self.classes[0].name == self.classes[1].name {
            return bad("class names must differ".into());
        }
        for c in &self.classes {
            if c.n_samples == 0 {
                return bad(format!("class '{}' has no samples", c.name));
            }
            if !(c.noise_std >= 0.0) {
                return bad(format!("class '{}' noise_std must be >= 0", c.name));
            }
            for p in &c.peaks {
                if !(p.center >= lo && p.center <= hi) {
                    return bad(format!("peak center {} outside axis range", p.center));
                }
                if !(p.amplitude_std >= 0.0 && p.width_std >= 0.0) {
                    return bad(format!("peak at {}: std fields must be >= 0", p.center));
                }
                if !(p.width_mean > 0.0) {
                    return bad(format!("peak at {}: width_mean must be > 0", p.center));
                }
                if !p.amplitude_mean.is_finite() {
                    return bad(format!("peak at {}: amplitude_mean not finite", p.center));
                }
            }
        }
        Ok(())
    }

    pub fn axis(&self) -> Vec<f64> {
        let (lo, hi) = self.axis_range;
        let last = (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| if i + 1 == self.n_points { hi } else { lo + (hi - lo) * i as f64 / last })
            .collect()
    }
}

/// Zones matching the reference benchmark: three peak zones (plausible)
/// separated by four background zones.
pub fn default_zone_config() -> ZoneConfig {
    let z = |name: &str, start, end, plausible| Zone {
        name: name.into(),
        start,
        end,
        plausible,
    };
    ZoneConfig {
        zones: vec![
            z("Background 1", 1.0, 101.0, false),
            z("Feature 1", 101.0, 193.3, true),
            z("Background 2", 193.3, 255.42, false),
            z("Feature 2", 255.42, 341.57, true),
            z("Background 3", 341.57, 460.0, false),
            z("Feature 3", 460.0, 539.9, true),
            z("Background 4", 539.9, 600.0, false),
        ],
    }
}

/// Draws every sample of every class. Deterministic in `cfg.seed`.
pub fn generate(cfg: &SyntheticConfig) -> Result<SpectralDataset> {
    cfg.validate()?;
    let axis = cfg.axis();
    let p = axis.len();
    let n: usize = cfg.classes.iter().map(|c| c.n_samples).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");

    let mut x = Array2::zeros((n, p));
    let mut labels = Vec::with_capacity(n);
    let mut ids = Vec::with_capacity(n);
    let mut row = 0;
    for class in &cfg.classes {
        for s in 0..class.n_samples {
            let mut out = x.row_mut(row);
            for peak in &class.peaks {
                let amp = peak.amplitude_mean + peak.amplitude_std * std_normal.sample(&mut rng);
                let width = loop {
                    let w = peak.width_mean + peak.width_std * std_normal.sample(&mut rng);
                    if w > 0.0 {
                        break w;
                    }
                };
                let denom = 2.0 * width * width;
                for (v, &a) in out.iter_mut().zip(&axis) {
                    let d = a - peak.center;
                    *v += amp * (-(d * d) / denom).exp();
                }
            }
            if class.noise_std > 0.0 {
                for v in out.iter_mut() {
                    *v += class.noise_std * std_normal.sample(&mut rng);
                }
            }
            labels.push(class.label);
            ids.push(format!("{}_{:04}", class.name, s + 1));
            row += 1;
        }
    }
    SpectralDataset::new(axis, x, labels, ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn degenerate() -> SyntheticConfig {
        let peak = PeakSpec {
            center: 150.0,
            amplitude_mean: 2.0,
            amplitude_std: 0.0,
            width_mean: 15.0,
            width_std: 0.0,
        };
        let class = |name: &str, label| ClassSpec {
            name: name.into(),
            label,
            n_samples: 3,
            noise_std: 0.0,
            peaks: vec![peak.clone()],
        };
        SyntheticConfig {
            n_points: 301,
            axis_range: (0.0, 300.0),
            classes: vec![class("A", 1), class("B", 0)],
            seed: 7,
        }
    }

    #[test]
    fn default_shape() {
        let ds = generate(&SyntheticConfig::default()).unwrap();
        assert_eq!(ds.n_samples(), 242);
        assert_eq!(ds.n_variables(), 300);
        assert_eq!(ds.axis[0], 1.0);
        assert_eq!(ds.axis[299], 600.0);
        assert_eq!(ds.sample_ids[0], "A_0001");
        assert_eq!(ds.sample_ids[116], "B_0001");
        assert_eq!(ds.labels.iter().filter(|&&l| l == 1).count(), 116);
    }

    #[test]
    fn gaussian_at_and_off_centre() {
        let ds = generate(&degenerate()).unwrap();
        assert_eq!(ds.axis[150], 150.0);
        assert_eq!(ds.intensities[[0, 150]], 2.0);
        assert_abs_diff_eq!(ds.intensities[[0, 165]], 2.0 * (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(ds.intensities[[0, 165]], 1.21306, epsilon = 1e-5);
        for i in 1..6 {
            assert_eq!(ds.intensities.row(i), ds.intensities.row(0));
        }
    }

    #[test]
    fn seeded_determinism() {
        let a = generate(&SyntheticConfig::default()).unwrap();
        let b = generate(&SyntheticConfig::default()).unwrap();
        assert_eq!(a, b);
        let cfg = SyntheticConfig { seed: 43, ..Default::default() };
        assert_ne!(generate(&cfg).unwrap().intensities, a.intensities);
    }

    #[test]
    fn feature_one_separates_classes() {
        let ds = generate(&SyntheticConfig::default()).unwrap();
        let cols: Vec<usize> = (0..300).filter(|&j| ds.axis[j] >= 101.0 && ds.axis[j] <= 193.3).collect();
        let zone_mean = |i: usize| cols.iter().map(|&j| ds.intensities[[i, j]]).sum::<f64>() / cols.len() as f64;
        let stats = |rows: &[usize]| {
            let v: Vec<f64> = rows.iter().map(|&i| zone_mean(i)).collect();
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
            (m, var / v.len() as f64)
        };
        let [b, a] = ds.class_indices();
        let (ma, sea) = stats(&a);
        let (mb, seb) = stats(&b);
        assert!((ma - mb) / (sea + seb).sqrt() > 10.0);
    }

    #[test]
    fn invalid_configs() {
        let mut c = degenerate();
        c.classes[0].peaks[0].amplitude_std = -1.0;
        assert!(generate(&c).is_err());
        let mut c = degenerate();
        c.classes[0].peaks[0].center = 1000.0;
        assert!(generate(&c).is_err());
        let mut c = degenerate();
        c.classes[1].label = 1;
        assert!(generate(&c).is_err());
    }

    #[test]
    fn default_zones_cover_axis() {
        let ds = generate(&SyntheticConfig::default()).unwrap();
        let zones = crate::dataio::resolve_zones(&default_zone_config(), &ds).unwrap();
        let total: usize = zones.iter().map(|z| z.indices.len()).sum();
        assert_eq!(total, 300);
    }
}
