use std::collections::HashSet;
use std::hash::Hash;

pub const RBO_DEFAULT_RHO: f64 = 0.7;
pub const RBO_DEFAULT_DEPTH: usize = 20;

/// Extrapolated rank-biased overlap of two duplicate-free rankings,
/// evaluated to depth `k = min(depth, |a|, |b|)`:
/// `(X_k/k)ρ^k + ((1−ρ)/ρ) Σ_{d≤k} (X_d/d) ρ^d`, with `X_d` the overlap
/// of the two depth-`d` prefixes. Empty comparisons give 0.
pub fn rbo<T: Eq + Hash>(a: &[T], b: &[T], rho: f64, depth: usize) -> f64 {
    assert!(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
    let k = depth.min(a.len()).min(b.len());
    if k == 0 {
        return 0.0;
    }
    let mut seen_a = HashSet::with_capacity(k);
    let mut seen_b = HashSet::with_capacity(k);
    let mut overlap = 0usize;
    let mut sum = 0.0;
    let mut weight = 1.0;
    for d in 1..=k {
        let (x, y) = (&a[d - 1], &b[d - 1]);
        seen_a.insert(x);
        if seen_b.contains(x) {
            overlap += 1;
        }
        seen_b.insert(y);
        if seen_a.contains(y) {
            overlap += 1;
        }
        weight *= rho;
        sum += overlap as f64 / d as f64 * weight;
    }
    let value = overlap as f64 / k as f64 * weight + (1.0 - rho) / rho * sum;
    value.clamp(0.0, 1.0)
}
