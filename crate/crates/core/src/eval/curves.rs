use std::collections::HashSet;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::dataio::ZoneIndices;
use crate::error::{Result, SmxError};
use crate::models::SpectralModel;

pub const SIMPLICITY_TOP_N: usize = 20;

/// Zone names in importance order, tagged with the method that made them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneRankedList {
    pub method: String,
    pub zones: Vec<String>,
}

impl ZoneRankedList {
    pub fn new(method: impl Into<String>, zones: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for z in &zones {
            if !seen.insert(z.as_str()) {
                return Err(SmxError::Config(format!("zone '{z}' listed twice in ranking")));
            }
        }
        Ok(ZoneRankedList { method: method.into(), zones })
    }
}

/// Metric values at depths `1..=k` plus their normalized area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalCurve {
    pub x: Vec<usize>,
    pub y: Vec<f64>,
    pub auc: f64,
}

impl EvalCurve {
    pub fn from_values(y: Vec<f64>) -> Self {
        EvalCurve {
            x: (1..=y.len()).collect(),
            auc: trapezoid_auc(&y),
            y,
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// The first `k` depths, with the area recomputed.
    pub fn truncated(&self, k: usize) -> EvalCurve {
        EvalCurve::from_values(self.y[..k.min(self.y.len())].to_vec())
    }
}

/// Trapezoid rule with depths mapped onto `[0, 1]`, so a constant curve of
/// value `v` has area `v`. One point gives that point; none gives 0.
pub fn trapezoid_auc(y: &[f64]) -> f64 {
    match y.len() {
        0 => 0.0,
        1 => y[0],
        k => {
            let h = 1.0 / (k - 1) as f64;
            y.windows(2).map(|w| 0.5 * (w[0] + w[1]) * h).sum()
        }
    }
}

/// Cumulatively zeroes the top-ranked zones of `x` and records the output
/// impact against the unmasked predictions at each depth.
pub fn faithfulness_curve(
    model: &dyn SpectralModel,
    x: ArrayView2<f64>,
    ranking: &[String],
    zones: &[ZoneIndices],
    k_max: usize,
) -> Result<EvalCurve> {
    if ranking.is_empty() {
        return Err(SmxError::Config("faithfulness needs a nonempty zone ranking".into()));
    }
    let depth = k_max.min(ranking.len());
    let index_sets = ranking[..depth]
        .iter()
        .map(|name| {
            zones
                .iter()
                .find(|z| &z.name == name)
                .map(|z| &z.indices)
                .ok_or_else(|| SmxError::Config(format!("ranked zone '{name}' is not in the zone config")))
        })
        .collect::<Result<Vec<_>>>()?;
    let base = model.outputs(x)?;
    let mut masked = x.to_owned();
    let mut y = Vec::with_capacity(depth);
    for idx in index_sets {
        for &j in idx {
            masked.column_mut(j).fill(0.0);
        }
        y.push(base.impact(&model.outputs(masked.view())?)?);
    }
    Ok(EvalCurve::from_values(y))
}

/// Share of plausible zones among the top `k`, for `k = 1..=min(k_max, len)`.
pub fn agreement_curve(ranking: &[String], plausible: &[String], k_max: usize) -> EvalCurve {
    let depth = k_max.min(ranking.len());
    let mut hits = 0usize;
    let y = ranking[..depth]
        .iter()
        .enumerate()
        .map(|(i, z)| {
            if plausible.contains(z) {
                hits += 1;
            }
            hits as f64 / (i + 1) as f64
        })
        .collect();
    EvalCurve::from_values(y)
}

/// Cumulative share of total importance held by the `k` largest scores.
/// Lists shorter than `top_n` hold their final value out to `top_n`. An
/// all-zero vector gives an all-zero curve.
pub fn simplicity_curve(importances: &[f64], top_n: usize) -> EvalCurve {
    let total: f64 = importances.iter().sum();
    let mut sorted: Vec<f64> = importances.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let y = (0..top_n)
        .map(|k| {
            if total > 0.0 {
                if let Some(v) = sorted.get(k) {
                    acc += v / total;
                }
            }
            acc.min(1.0)
        })
        .collect();
    EvalCurve::from_values(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::RidgeModel;
    use ndarray::Array2;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn auc_conventions() {
        assert_eq!(trapezoid_auc(&[]), 0.0);
        assert_eq!(trapezoid_auc(&[0.4]), 0.4);
        assert!((trapezoid_auc(&[0.3; 7]) - 0.3).abs() < 1e-15);
        assert!((trapezoid_auc(&[0.0, 1.0]) - 0.5).abs() < 1e-15);
        assert!((trapezoid_auc(&[0.0, 1.0, 1.0]) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn agreement_examples() {
        let c = agreement_curve(&names(&["a", "b"]), &names(&["a"]), 10);
        assert_eq!(c.y, vec![1.0, 0.5]);
        let c = agreement_curve(&names(&["a", "b", "c"]), &names(&["a", "b", "c"]), 2);
        assert_eq!(c.y, vec![1.0, 1.0]);
        let c = agreement_curve(&names(&["x", "y"]), &names(&["a"]), 5);
        assert_eq!(c.y, vec![0.0, 0.0]);
    }

    #[test]
    fn simplicity_examples() {
        let c = simplicity_curve(&[0.0, 3.0, 0.0], 20);
        assert_eq!(c.len(), 20);
        assert_eq!(c.y[0], 1.0);
        let c = simplicity_curve(&[1.0; 20], 20);
        for (k, v) in c.y.iter().enumerate() {
            assert!((v - (k + 1) as f64 / 20.0).abs() < 1e-12);
        }
        assert!(simplicity_curve(&[0.0; 4], 20).y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn duplicate_zone_rejected() {
        assert!(ZoneRankedList::new("smx", names(&["a", "a"])).is_err());
        assert!(ZoneRankedList::new("smx", names(&["a", "b"])).is_ok());
    }

    fn zones() -> Vec<ZoneIndices> {
        vec![
            ZoneIndices { name: "z1".into(), indices: vec![0, 1] },
            ZoneIndices { name: "z2".into(), indices: vec![2, 3] },
            ZoneIndices { name: "z3".into(), indices: vec![4] },
        ]
    }

    fn data() -> Array2<f64> {
        Array2::from_shape_fn((12, 5), |(i, j)| ((i * 7 + j * 3) % 5) as f64 - 1.5 + 0.1 * j as f64)
    }

    #[test]
    fn zero_weight_zone_has_zero_faithfulness() {
        let m = RidgeModel { weights: vec![0.0, 0.0, 1.0, -2.0, 0.5], intercept: 0.3 };
        let c = faithfulness_curve(&m, data().view(), &names(&["z1", "z2"]), &zones(), 9).unwrap();
        assert_eq!(c.y[0], 0.0);
        assert!(c.y[1] > 0.0);
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn cumulative_masking_dominates_single_zone() {
        // same-sign contributions per row so masking more only adds
        let x = data().mapv(|v| v.abs() + 0.1);
        let m = RidgeModel { weights: vec![0.5, 1.0, 2.0, 0.25, 3.0], intercept: 0.0 };
        let ranking = names(&["z2", "z1", "z3"]);
        let c = faithfulness_curve(&m, x.view(), &ranking, &zones(), 3).unwrap();
        for (k, name) in ranking.iter().enumerate() {
            let single = faithfulness_curve(&m, x.view(), std::slice::from_ref(name), &zones(), 1).unwrap();
            assert!(c.y[k] >= single.y[0] - 1e-12);
        }
        assert!(c.y.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn unknown_zone_is_error() {
        let m = RidgeModel { weights: vec![1.0; 5], intercept: 0.0 };
        let err = faithfulness_curve(&m, data().view(), &names(&["nope"]), &zones(), 3).unwrap_err();
        assert!(err.is_config());
        assert!(faithfulness_curve(&m, data().view(), &[], &zones(), 3).is_err());
    }

    proptest! {
        #[test]
        fn simplicity_is_monotone_and_bounded(v in prop::collection::vec(0.0f64..10.0, 0..40)) {
            let c = simplicity_curve(&v, 20);
            prop_assert!(c.y.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!(c.y.iter().all(|&y| (0.0..=1.0).contains(&y)));
        }

        #[test]
        fn agreement_is_integer_ratio(flags in prop::collection::vec(any::<bool>(), 1..15)) {
            let ranking: Vec<String> = (0..flags.len()).map(|i| format!("z{i}")).collect();
            let plausible: Vec<String> = ranking.iter().zip(&flags).filter(|(_, &f)| f).map(|(z, _)| z.clone()).collect();
            let c = agreement_curve(&ranking, &plausible, 20);
            for (k, y) in c.y.iter().enumerate() {
                let hits = flags[..=k].iter().filter(|&&f| f).count();
                prop_assert_eq!(*y, hits as f64 / (k + 1) as f64);
            }
        }

        #[test]
        fn auc_matches_independent_trapezoid(y in prop::collection::vec(-5.0f64..5.0, 2..30)) {
            let c = EvalCurve::from_values(y.clone());
            let xs: Vec<f64> = (0..y.len()).map(|i| i as f64 / (y.len() - 1) as f64).collect();
            let mut area = 0.0;
            for i in 1..y.len() {
                area += (xs[i] - xs[i - 1]) * (y[i] + y[i - 1]) / 2.0;
            }
            prop_assert!((c.auc - area).abs() < 1e-12);
        }
    }
}
