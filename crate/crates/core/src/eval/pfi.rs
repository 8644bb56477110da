use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataio::ZoneIndices;
use crate::error::Result;
use crate::exec::Execution;
use crate::models::SpectralModel;

pub const PFI_DEFAULT_REPEATS: usize = 10;

/// Permutation importance per variable: the mean output impact, over
/// `repeats` seeded shuffles of that column alone. Each (repeat, column)
/// pair draws from its own ChaCha stream so results do not depend on
/// scheduling.
pub fn pfi(
    model: &dyn SpectralModel,
    x: ArrayView2<f64>,
    repeats: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    let base = model.outputs(x)?;
    let p = x.ncols();
    exec.try_map(p, |j| {
        if repeats == 0 {
            return Ok(0.0);
        }
        let mut xp = x.to_owned();
        let mut total = 0.0;
        for r in 0..repeats {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((r as u64) << 32) | j as u64);
            let mut col = x.column(j).to_vec();
            col.shuffle(&mut rng);
            xp.column_mut(j).iter_mut().zip(&col).for_each(|(d, s)| *d = *s);
            total += base.impact(&model.outputs(xp.view())?)?;
        }
        Ok(total / repeats as f64)
    })
}

/// Zone names ordered by their most important member variable; variables
/// with zero importance or outside every zone are skipped.
pub fn rank_zones_by_variables(importances: &[f64], zones: &[ZoneIndices]) -> Vec<String> {
    let mut order: Vec<usize> = (0..importances.len()).filter(|&j| importances[j] > 0.0).collect();
    order.sort_by(|&a, &b| importances[b].total_cmp(&importances[a]));
    let mut out: Vec<String> = Vec::new();
    for j in order {
        if let Some(z) = zones.iter().find(|z| z.indices.contains(&j)) {
            if !out.contains(&z.name) {
                out.push(z.name.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::RidgeModel;
    use ndarray::Array2;

    fn data() -> Array2<f64> {
        Array2::from_shape_fn((15, 4), |(i, j)| match j {
            2 => 1.25,
            _ => ((i * 11 + j * 5) % 7) as f64 - 3.0 + 0.01 * i as f64,
        })
    }

    #[test]
    fn zero_weight_and_constant_columns_score_zero() {
        let m = RidgeModel::from_weights(vec![1.0, 0.0, 2.0, -0.5], 0.0);
        let imp = pfi(&m, data().view(), 10, 7, Execution::Sequential).unwrap();
        assert_eq!(imp[1], 0.0);
        assert_eq!(imp[2], 0.0);
        assert!(imp[0] > 0.0 && imp[3] > 0.0);
    }

    #[test]
    fn single_variable_reduction() {
        let x = data();
        let m = RidgeModel::from_weights(vec![1.0, 0.0, 0.0, 0.0], 0.0);
        let repeats = 5;
        let imp = pfi(&m, x.view(), repeats, 3, Execution::Sequential).unwrap();
        let col = x.column(0).to_vec();
        let mut expected = 0.0;
        for r in 0..repeats {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            rng.set_stream((r as u64) << 32);
            let mut perm = col.clone();
            perm.shuffle(&mut rng);
            expected += col.iter().zip(&perm).map(|(a, b)| (a - b).abs()).sum::<f64>() / col.len() as f64;
        }
        assert!((imp[0] - expected / repeats as f64).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_execution() {
        let m = RidgeModel::from_weights(vec![1.0, 0.3, 2.0, -0.5], 0.1);
        let a = pfi(&m, data().view(), 4, 11, Execution::Sequential).unwrap();
        let b = pfi(&m, data().view(), 4, 11, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let c = pfi(&m, data().view(), 4, 12, Execution::Parallel).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zone_order_from_variables() {
        let zones = vec![
            ZoneIndices { name: "a".into(), indices: vec![0, 1] },
            ZoneIndices { name: "b".into(), indices: vec![2, 3] },
        ];
        assert_eq!(rank_zones_by_variables(&[0.1, 0.0, 0.5, 0.4, 9.0], &zones), vec!["b", "a"]);
        assert!(rank_zones_by_variables(&[0.0; 4], &zones).is_empty());
    }
}
