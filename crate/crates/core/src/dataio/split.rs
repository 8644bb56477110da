use ndarray::{ArrayView1, Axis};

use super::SpectralDataset;
use crate::error::{Result, SmxError};

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Kennard–Stone selection of `count` rows of `points` (Euclidean
/// distance). Returns positions into `rows` in selection order.
///
/// The first two picks are the farthest pair; each later pick maximises the
/// minimum distance to everything already picked. Ties go to the lowest
/// position.
pub fn kennard_stone_select(
    points: &ndarray::Array2<f64>,
    rows: &[usize],
    count: usize,
) -> Vec<usize> {
    let m = rows.len();
    let count = count.min(m);
    if count == 0 {
        return Vec::new();
    }
    let row = |k: usize| points.index_axis(Axis(0), rows[k]);

    let mut best = (0, 0, f64::NEG_INFINITY);
    for a in 0..m {
        for b in a + 1..m {
            let d = sq_dist(row(a), row(b));
            if d > best.2 {
                best = (a, b, d);
            }
        }
    }
    if m == 1 {
        return vec![0];
    }
    let mut selected = vec![best.0];
    if count >= 2 {
        selected.push(best.1);
    }
    let mut chosen = vec![false; m];
    let mut min_d = vec![f64::INFINITY; m];
    for &s in &selected {
        chosen[s] = true;
    }
    for k in 0..m {
        for &s in &selected {
            min_d[k] = min_d[k].min(sq_dist(row(k), row(s)));
        }
    }
    while selected.len() < count {
        let mut pick = None;
        let mut pick_d = f64::NEG_INFINITY;
        for k in 0..m {
            if !chosen[k] && min_d[k] > pick_d {
                pick = Some(k);
                pick_d = min_d[k];
            }
        }
        let Some(k) = pick else { break };
        chosen[k] = true;
        selected.push(k);
        for q in 0..m {
            if !chosen[q] {
                min_d[q] = min_d[q].min(sq_dist(row(q), row(k)));
            }
        }
    }
    selected
}

/// Per-class Kennard–Stone split. Each class contributes
/// `round(train_fraction · size)` rows to train, clamped to
/// `[1, size − 1]`. Both outputs keep the original row order.
pub fn kennard_stone_split(
    ds: &SpectralDataset,
    train_fraction: f64,
) -> Result<(SpectralDataset, SpectralDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(SmxError::Config(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut in_train = vec![false; ds.n_samples()];
    for (class, rows) in ds.class_indices().iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        if rows.len() < 2 {
            return Err(SmxError::Config(format!(
                "class {class} has {} sample(s); Kennard-Stone needs at least 2",
                rows.len()
            )));
        }
        let count = ((train_fraction * rows.len() as f64).round() as usize).clamp(1, rows.len() - 1);
        for k in kennard_stone_select(&ds.intensities, rows, count) {
            in_train[rows[k]] = true;
        }
    }
    let train: Vec<usize> = (0..ds.n_samples()).filter(|&i| in_train[i]).collect();
    let test: Vec<usize> = (0..ds.n_samples()).filter(|&i| !in_train[i]).collect();
    if train.is_empty() || test.is_empty() {
        return Err(SmxError::Config("split leaves train or test empty".into()));
    }
    Ok((ds.subset(&train), ds.subset(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn one_d(values: &[f64], labels: &[u8]) -> SpectralDataset {
        let n = values.len();
        SpectralDataset::new(
            vec![1.0],
            Array2::from_shape_vec((n, 1), values.to_vec()).unwrap(),
            labels.to_vec(),
            (0..n).map(|i| format!("s{i}")).collect(),
        )
        .unwrap()
    }

    /// Brute-force max-min reference on 1-D data.
    fn brute_force_ks(values: &[f64], count: usize) -> Vec<usize> {
        let n = values.len();
        let mut pair = (0, 1);
        for a in 0..n {
            for b in a + 1..n {
                let d = (values[a] - values[b]).abs();
                if d > (values[pair.0] - values[pair.1]).abs() {
                    pair = (a, b);
                }
            }
        }
        let mut sel = vec![pair.0, pair.1];
        while sel.len() < count {
            let next = (0..n)
                .filter(|k| !sel.contains(k))
                .map(|k| (k, sel.iter().map(|&s| (values[k] - values[s]).abs()).fold(f64::INFINITY, f64::min)))
                .fold((usize::MAX, -1.0), |acc, (k, d)| if d > acc.1 { (k, d) } else { acc });
            sel.push(next.0);
        }
        sel.truncate(count);
        sel
    }

    #[test]
    fn third_pick_maximises_minimum_distance() {
        let vals = [0.0, 10.0, 5.0, 2.0];
        let ds = one_d(&vals, &[0, 0, 0, 0]);
        let sel = kennard_stone_select(&ds.intensities, &[0, 1, 2, 3], 3);
        assert_eq!(sel, vec![0, 1, 2]);
        assert_eq!(sel, brute_force_ks(&vals, 3));
    }

    #[test]
    fn split_per_class() {
        let vals = [0.0, 10.0, 5.0, 2.0, 100.0, 101.0, 130.0, 120.0];
        let ds = one_d(&vals, &[0, 0, 0, 0, 1, 1, 1, 1]);
        let (train, test) = kennard_stone_split(&ds, 0.75).unwrap();
        assert_eq!(train.sample_ids, vec!["s0", "s1", "s2", "s4", "s6", "s7"]);
        assert_eq!(test.sample_ids, vec!["s3", "s5"]);
    }

    #[test]
    fn two_per_class_takes_one_of_extreme_pair() {
        let ds = one_d(&[1.0, 4.0, 7.0, 9.0], &[0, 0, 1, 1]);
        let (train, test) = kennard_stone_split(&ds, 0.5).unwrap();
        assert_eq!(train.n_samples(), 2);
        assert_eq!(test.n_samples(), 2);
        assert_eq!(train.labels, vec![0, 1]);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        // Duplicated points: the pair (0, 3) and (0, 4) tie; 3 wins.
        let vals = [0.0, 1.0, 1.0, 5.0, 5.0];
        let ds = one_d(&vals, &[0; 5]);
        let sel = kennard_stone_select(&ds.intensities, &[0, 1, 2, 3, 4], 4);
        assert_eq!(sel, vec![0, 3, 1, 2]);
    }

    #[test]
    fn matches_brute_force_on_random_1d() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(3..12);
            let vals: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
            let ds = one_d(&vals, &vec![0; n]);
            let rows: Vec<usize> = (0..n).collect();
            let count = rng.random_range(2..=n);
            assert_eq!(kennard_stone_select(&ds.intensities, &rows, count), brute_force_ks(&vals, count));
        }
    }

    #[test]
    fn errors() {
        let ds = one_d(&[1.0, 2.0, 3.0], &[0, 0, 1]);
        assert!(kennard_stone_split(&ds, 0.7).is_err());
        let ds = one_d(&[1.0, 2.0], &[0, 0]);
        assert!(kennard_stone_split(&ds, 1.0).is_err());
    }
}
