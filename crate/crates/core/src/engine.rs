//! Stochastic bags, median-replacement zone perturbation and per-bag
//! predicate ranking by zone-length-normalised impact.

use ndarray::{Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SmxError};
use crate::exec::Execution;
use crate::models::{ModelOutputs, SpectralModel};
use crate::predicates::{validate_quantiles, PredicateSet};
use crate::zone::ZoneModel;

/// Replacement statistic for perturbed zone variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Replacement {
    #[default]
    Median,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub bags: usize,
    pub bag_fraction: f64,
    pub min_support_fraction: f64,
    pub quantiles: Vec<f64>,
    pub seeds: Vec<u64>,
    pub replacement: Replacement,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            bags: 10,
            bag_fraction: 0.8,
            min_support_fraction: 0.2,
            quantiles: vec![0.2, 0.4, 0.6, 0.8],
            seeds: vec![1, 2, 3, 4],
            replacement: Replacement::Median,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SmxError::Config(m));
        if self.bags == 0 {
            return bad("bag count must be >= 1".into());
        }
        if !(self.bag_fraction > 0.0 && self.bag_fraction <= 1.0) {
            return bad(format!("bag fraction must lie in (0, 1], got {}", self.bag_fraction));
        }
        if !(self.min_support_fraction > 0.0 && self.min_support_fraction < 1.0) {
            return bad(format!(
                "min support fraction must lie in (0, 1), got {}",
                self.min_support_fraction
            ));
        }
        validate_quantiles(&self.quantiles)?;
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        let mut s = self.seeds.clone();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return bad(format!("seeds must be distinct: {:?}", self.seeds));
        }
        Ok(())
    }

    /// `round(bag_fraction · n)`, at least 1.
    pub fn bag_size(&self, n: usize) -> usize {
        ((self.bag_fraction * n as f64).round() as usize).clamp(1, n.max(1))
    }

    /// `ceil(min_support_fraction · n)`.
    pub fn min_support(&self, n: usize) -> usize {
        // Guard against 0.2 · 170 = 34.000000000000004.
        (self.min_support_fraction * n as f64 - 1e-9).ceil().max(0.0) as usize
    }
}

/// Uniform `n_b`-subset of `0..n` by partial Fisher–Yates on a ChaCha
/// stream keyed by `(seed, bag_index)`. Returned in draw order.
pub fn draw_bag(seed: u64, bag_index: usize, n: usize, n_b: usize) -> Result<Vec<usize>> {
    if n_b > n {
        return Err(SmxError::Config(format!("bag size {n_b} exceeds sample count {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(bag_index as u64);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..n_b {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(n_b);
    Ok(idx)
}

/// Column medians; even-length columns use the mean of the middle pair.
pub fn column_medians(x: ArrayView2<f64>) -> Vec<f64> {
    x.axis_iter(Axis(1))
        .map(|col| {
            let mut v = col.to_vec();
            v.sort_by(f64::total_cmp);
            let n = v.len();
            if n == 0 {
                f64::NAN
            } else if n % 2 == 1 {
                v[n / 2]
            } else {
                0.5 * (v[n / 2 - 1] + v[n / 2])
            }
        })
        .collect()
}

/// Copies `x`, replacing the zone's columns with the training medians.
pub fn perturb_zone(x: ArrayView2<f64>, zone: &[usize], medians: &[f64]) -> Result<Array2<f64>> {
    let p = x.ncols();
    if medians.len() != p {
        return Err(SmxError::Dimension {
            expected: p,
            got: medians.len(),
            context: "medians vs matrix width",
        });
    }
    if let Some(&j) = zone.iter().find(|&&j| j >= p) {
        return Err(SmxError::Config(format!("zone index {j} out of range for width {p}")));
    }
    let mut out = x.to_owned();
    for &j in zone {
        out.column_mut(j).fill(medians[j]);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BagEntry {
    pub predicate: usize,
    pub support: usize,
    pub raw_impact: f64,
    /// `raw_impact / d_m`.
    pub impact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BagResult {
    pub bag: usize,
    /// Sorted by impact, descending; ties keep predicate-set order.
    pub entries: Vec<BagEntry>,
    /// Majority predicted class over the last-ranked predicate's support
    /// (ties to class 0). `None` when every predicate was filtered out.
    pub terminal_class: Option<u8>,
}

/// One JSON-lines record of the bag trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub seed: u64,
    pub bag: usize,
    pub predicate: usize,
    pub support: usize,
    pub raw_impact: f64,
    pub impact: f64,
}

pub fn trace_records(seed: u64, bags: &[BagResult]) -> Vec<TraceRecord> {
    bags.iter()
        .flat_map(|b| {
            b.entries.iter().map(move |e| TraceRecord {
                seed,
                bag: b.bag,
                predicate: e.predicate,
                support: e.support,
                raw_impact: e.raw_impact,
                impact: e.impact,
            })
        })
        .collect()
}

/// Everything bag evaluation needs that does not depend on the seed.
pub struct BagContext<'a> {
    pub model: &'a dyn SpectralModel,
    pub x: ArrayView2<'a, f64>,
    pub zones: &'a [ZoneModel],
    pub predicates: &'a PredicateSet,
    pub medians: Vec<f64>,
    pub original: ModelOutputs,
}

impl<'a> BagContext<'a> {
    pub fn new(
        model: &'a dyn SpectralModel,
        x: ArrayView2<'a, f64>,
        zones: &'a [ZoneModel],
        predicates: &'a PredicateSet,
    ) -> Result<Self> {
        if predicates.indicator.nrows() != x.nrows() {
            return Err(SmxError::Dimension {
                expected: x.nrows(),
                got: predicates.indicator.nrows(),
                context: "predicate indicator rows vs training rows",
            });
        }
        let original = model.outputs(x)?;
        Ok(BagContext {
            model,
            x,
            zones,
            predicates,
            medians: column_medians(x),
            original,
        })
    }

    /// Runs all bags for one seed.
    pub fn run(&self, cfg: &EngineConfig, seed: u64, exec: Execution) -> Result<Vec<BagResult>> {
        let n = self.x.nrows();
        let n_b = cfg.bag_size(n);
        let n_min = cfg.min_support(n);
        exec.try_map(cfg.bags, |b| self.run_bag(seed, b, n_b, n_min, exec))
    }

    fn run_bag(&self, seed: u64, bag: usize, n_b: usize, n_min: usize, exec: Execution) -> Result<BagResult> {
        let mut rows = draw_bag(seed, bag, self.x.nrows(), n_b)?;
        rows.sort_unstable();
        let scored = exec.try_map(self.predicates.len(), |j| -> Result<Option<BagEntry>> {
            let support = self.predicates.support_in(j, &rows);
            if support.len() < n_min || support.is_empty() {
                return Ok(None);
            }
            let zone = &self.zones[self.predicates.predicates[j].zone_index];
            let sub = self.x.select(Axis(0), &support);
            let perturbed = perturb_zone(sub.view(), &zone.indices, &self.medians)?;
            let after = self.model.outputs(perturbed.view())?;
            let raw = self.original.select(&support).impact(&after)?;
            Ok(Some(BagEntry {
                predicate: j,
                support: support.len(),
                raw_impact: raw,
                impact: raw / zone.dim() as f64,
            }))
        })?;
        let mut entries: Vec<BagEntry> = scored.into_iter().flatten().collect();
        entries.sort_by(|a, b| b.impact.total_cmp(&a.impact));
        let terminal_class = entries.last().map(|last| {
            let support = self.predicates.support_in(last.predicate, &rows);
            let ones = support
                .iter()
                .filter(|&&i| self.original.predicted_class(i) == 1)
                .count();
            u8::from(ones * 2 > support.len())
        });
        Ok(BagResult {
            bag,
            entries,
            terminal_class,
        })
    }
}

/// Runs every bag of one seed.
pub fn run_bags(
    model: &dyn SpectralModel,
    x: ArrayView2<f64>,
    zones: &[ZoneModel],
    predicates: &PredicateSet,
    cfg: &EngineConfig,
    seed: u64,
    exec: Execution,
) -> Result<Vec<BagResult>> {
    cfg.validate()?;
    BagContext::new(model, x, zones, predicates)?.run(cfg, seed, exec)
}
