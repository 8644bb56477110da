//! Quantile thresholds on zone scores and the two-sided predicates built
//! from them.

use std::fmt;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SmxError};
use crate::zone::ZoneModel;

/// Linear-interpolation empirical quantile on `(n − 1)·q`.
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(SmxError::Config("quantile of an empty list".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(SmxError::Config(format!("quantile level {q} outside [0, 1]")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 >= v.len() {
        return Ok(v[v.len() - 1]);
    }
    Ok(v[lo] + (h - lo as f64) * (v[lo + 1] - v[lo]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Le => "<=",
            Direction::Gt => ">",
        }
    }

    pub fn holds(self, score: f64, tau: f64) -> bool {
        match self {
            Direction::Le => score <= tau,
            Direction::Gt => score > tau,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub zone: String,
    /// Position of the zone in the zone-model list.
    #[serde(skip)]
    pub zone_index: usize,
    pub direction: Direction,
    pub tau: f64,
    pub quantile_level: f64,
}

impl Predicate {
    /// Display label with the threshold at two decimals, e.g. `Feature 1 > 3.27`.
    pub fn label(&self) -> String {
        format!("{} {} {:.2}", self.zone, self.direction.symbol(), self.tau)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Unique predicates plus the n × N′ indicator of which training samples
/// satisfy each.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateSet {
    pub predicates: Vec<Predicate>,
    pub indicator: Array2<bool>,
}

impl PredicateSet {
    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    /// Sample indices satisfying predicate `j`, restricted to `rows`.
    pub fn support_in(&self, j: usize, rows: &[usize]) -> Vec<usize> {
        rows.iter().copied().filter(|&i| self.indicator[[i, j]]).collect()
    }
}

pub fn validate_quantiles(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(SmxError::Config("quantile set is empty".into()));
    }
    if levels.iter().any(|&q| !(q > 0.0 && q < 1.0)) {
        return Err(SmxError::Config(format!(
            "quantile levels must lie in (0, 1): {levels:?}"
        )));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SmxError::Config(format!(
            "quantile levels must be strictly increasing: {levels:?}"
        )));
    }
    Ok(())
}

/// Builds predicates zone-major, quantile-minor, `<=` before `>`; a
/// predicate whose (zone, direction, tau bits) already exists is dropped.
///
/// `scores` is n × M, column m holding zone m's training scores.
pub fn build_predicates(
    scores: &Array2<f64>,
    zone_models: &[ZoneModel],
    levels: &[f64],
) -> Result<PredicateSet> {
    validate_quantiles(levels)?;
    if scores.ncols() != zone_models.len() {
        return Err(SmxError::Dimension {
            expected: zone_models.len(),
            got: scores.ncols(),
            context: "score columns vs zone models",
        });
    }
    let mut predicates: Vec<Predicate> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (m, model) in zone_models.iter().enumerate() {
        let col = scores.column(m).to_vec();
        for &q in levels {
            let tau = quantile(&col, q)?;
            for direction in [Direction::Le, Direction::Gt] {
                if seen.insert((m, direction, tau.to_bits())) {
                    predicates.push(Predicate {
                        zone: model.zone_name.clone(),
                        zone_index: m,
                        direction,
                        tau,
                        quantile_level: q,
                    });
                }
            }
        }
    }
    let n = scores.nrows();
    let indicator = Array2::from_shape_fn((n, predicates.len()), |(i, j)| {
        let p = &predicates[j];
        p.direction.holds(scores[[i, p.zone_index]], p.tau)
    });
    Ok(PredicateSet {
        predicates,
        indicator,
    })
}
