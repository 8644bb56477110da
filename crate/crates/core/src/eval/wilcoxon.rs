use serde::{Deserialize, Serialize};

use crate::error::{Result, SmxError};

/// Largest nonzero sample size for which the exact null distribution is
/// tabulated (`2^n` must fit a `u128`).
pub const WILCOXON_MAX_N: usize = 120;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Differences left after dropping zeros.
    pub n: usize,
    /// `min(W+, W−)`.
    pub statistic: f64,
    pub w_plus: f64,
    /// Exact two-sided p value, `p_count / 2^n`.
    pub p_value: f64,
    pub p_count: u128,
    pub median_difference: f64,
}

/// Exact two-sided Wilcoxon signed-rank test. Zeros are dropped, tied
/// magnitudes share average ranks, and the null distribution is counted
/// over all `2^n` sign assignments of the realized ranks. The p value is
/// the share of assignments whose `W+` lies at least as far from its mean
/// as the observed one.
pub fn wilcoxon_signed_rank(diffs: &[f64]) -> Result<WilcoxonResult> {
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(SmxError::DegenerateSample("non-finite difference".into()));
    }
    let median_difference = super::stability::median(diffs);
    let mut nz: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
    let n = nz.len();
    if n == 0 {
        return Err(SmxError::DegenerateSample("all differences are zero".into()));
    }
    if n < 4 {
        return Err(SmxError::DegenerateSample(format!(
            "need at least 4 nonzero differences, got {n}"
        )));
    }
    if n > WILCOXON_MAX_N {
        return Err(SmxError::DegenerateSample(format!(
            "exact test supports at most {WILCOXON_MAX_N} nonzero differences, got {n}"
        )));
    }
    nz.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    // doubled average ranks are integers
    let mut rank2 = vec![0u64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && nz[j + 1].abs() == nz[i].abs() {
            j += 1;
        }
        // ranks i+1..=j+1 average to (i+j+2)/2
        for r in &mut rank2[i..=j] {
            *r = (i + j + 2) as u64;
        }
        i = j + 1;
    }
    let total2: u64 = rank2.iter().sum();
    let w_plus2: u64 = nz.iter().zip(&rank2).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();

    // counts[s] = number of sign patterns with doubled W+ equal to s
    let mut counts = vec![0u128; total2 as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in &rank2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let observed = (2 * w_plus2 as i128 - total2 as i128).abs();
    let p_count: u128 = counts
        .iter()
        .enumerate()
        .filter(|&(s, _)| (2 * s as i128 - total2 as i128).abs() >= observed)
        .map(|(_, &c)| c)
        .sum();
    let w_plus = w_plus2 as f64 / 2.0;
    let w_minus = (total2 - w_plus2) as f64 / 2.0;
    Ok(WilcoxonResult {
        n,
        statistic: w_plus.min(w_minus),
        w_plus,
        p_value: p_count as f64 / (1u128 << n) as f64,
        p_count,
        median_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Enumerates every sign pattern directly from the data.
    fn oracle(diffs: &[f64]) -> (u128, f64) {
        let nz: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
        let n = nz.len();
        let ranks: Vec<f64> = nz
            .iter()
            .map(|d| {
                let less = nz.iter().filter(|e| e.abs() < d.abs()).count() as f64;
                let eq = nz.iter().filter(|e| e.abs() == d.abs()).count() as f64;
                less + (eq + 1.0) / 2.0
            })
            .collect();
        let total: f64 = ranks.iter().sum();
        let w: f64 = nz.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
        let obs = (w - total / 2.0).abs();
        let mut count = 0u128;
        for mask in 0u64..(1 << n) {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if (s - total / 2.0).abs() >= obs - 1e-9 {
                count += 1;
            }
        }
        (count, w.min(total - w))
    }

    #[test]
    fn eight_positive_differences() {
        let r = wilcoxon_signed_rank(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]).unwrap();
        assert_eq!(r.p_value, 0.0078125);
        assert_eq!(r.p_count, 2);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(format!("{:.3}", r.p_value), "0.008");
    }

    #[test]
    fn w_three_matches_enumeration() {
        // ranks 1 and 2 negative → W− = 3
        let d = [-0.1, -0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
        let r = wilcoxon_signed_rank(&d).unwrap();
        assert_eq!(r.statistic, 3.0);
        assert_eq!(r.p_count, oracle(&d).0);
    }

    #[test]
    fn degenerate_samples() {
        assert!(matches!(wilcoxon_signed_rank(&[0.0; 6]), Err(SmxError::DegenerateSample(_))));
        assert!(wilcoxon_signed_rank(&[1.0, 2.0, 0.0, 0.0, -1.0]).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(d in prop::collection::vec((-3i32..4).prop_map(|v| v as f64 * 0.5), 4..13)) {
            prop_assume!(d.iter().filter(|&&v| v != 0.0).count() >= 4);
            let r = wilcoxon_signed_rank(&d).unwrap();
            let (count, stat) = oracle(&d);
            prop_assert_eq!(r.p_count, count);
            prop_assert_eq!(r.statistic, stat);
            prop_assert!(r.p_value > 0.0 && r.p_value <= 1.0);
        }

        #[test]
        fn negation_keeps_p(d in prop::collection::vec(-5.0f64..5.0, 4..12)) {
            let neg: Vec<f64> = d.iter().map(|v| -v).collect();
            prop_assert_eq!(wilcoxon_signed_rank(&d).unwrap().p_value, wilcoxon_signed_rank(&neg).unwrap().p_value);
        }
    }
}
