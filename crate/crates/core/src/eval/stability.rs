use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::rbo::rbo;
use crate::error::Result;
use crate::exec::Execution;

pub const STABILITY_RUNS: usize = 10;

/// Pairwise `1 − RBO` over all run pairs `(a, b)`, `a < b`, plus the median.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstabilityReport {
    pub seeds: Vec<u64>,
    pub pairwise: Vec<f64>,
    pub median: f64,
}

/// Median with the midpoint rule for even lengths; 0 for empty input.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Runs `runner` once per seed and compares every pair of the resulting
/// rankings with rank-biased overlap.
pub fn stability_study<T, F>(runner: F, seeds: &[u64], rho: f64, depth: usize, exec: Execution) -> Result<InstabilityReport>
where
    T: Eq + Hash + Send,
    F: Fn(u64) -> Result<Vec<T>> + Sync + Send,
{
    let lists = exec.try_map(seeds.len(), |i| runner(seeds[i]))?;
    let mut pairwise = Vec::with_capacity(seeds.len() * seeds.len().saturating_sub(1) / 2);
    for a in 0..lists.len() {
        for b in a + 1..lists.len() {
            pairwise.push(1.0 - rbo(&lists[a], &lists[b], rho, depth));
        }
    }
    Ok(InstabilityReport {
        seeds: seeds.to_vec(),
        median: median(&pairwise),
        pairwise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeds() -> Vec<u64> {
        (0..10).collect()
    }

    #[test]
    fn deterministic_stub_is_fully_stable() {
        let r = stability_study(|_| Ok(vec![1, 2, 3, 4]), &seeds(), 0.7, 20, Execution::Parallel).unwrap();
        assert_eq!(r.pairwise.len(), 45);
        assert!(r.pairwise.iter().all(|&v| v.abs() < 1e-12));
        assert!(r.median.abs() < 1e-12);
    }

    #[test]
    fn reversing_stub_is_bimodal() {
        let fwd = vec![1, 2, 3, 4, 5];
        let rev: Vec<i32> = fwd.iter().rev().copied().collect();
        let runner = |s: u64| Ok(if s % 2 == 1 { rev.clone() } else { fwd.clone() });
        let r = stability_study(runner, &seeds(), 0.7, 20, Execution::Sequential).unwrap();
        let other = 1.0 - rbo(&fwd, &rev, 0.7, 20);
        assert!(r.pairwise.iter().all(|&v| v.abs() < 1e-12 || (v - other).abs() < 1e-12));
        // 20 same-parity pairs, 25 mixed
        assert_eq!(r.pairwise.iter().filter(|&&v| v.abs() < 1e-12).count(), 20);
        assert!((r.median - other).abs() < 1e-12);
    }

    #[test]
    fn median_rules() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[]), 0.0);
    }
}
