use serde::{Deserialize, Serialize};

use super::build::ExplanationGraph;
use super::lrc::lrc_all;
use crate::dataio::ZoneConfig;
use crate::predicates::PredicateSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedPredicate {
    /// Index into the predicate set.
    pub predicate: usize,
    pub mean_lrc: f64,
    pub per_seed: Vec<f64>,
}

/// Predicates ordered by mean LRC, descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateRanking {
    pub seeds: Vec<u64>,
    pub entries: Vec<RankedPredicate>,
}

impl PredicateRanking {
    /// Predicate indices in rank order.
    pub fn order(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.predicate).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedZone {
    pub zone: String,
    /// False for zones with no predicate of positive mean LRC.
    pub ranked: bool,
    /// Best predicate of this zone, if ranked.
    pub top_predicate: Option<usize>,
    pub mean_lrc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneRanking {
    pub zones: Vec<RankedZone>,
}

impl ZoneRanking {
    pub fn names(&self) -> Vec<&str> {
        self.zones.iter().map(|z| z.zone.as_str()).collect()
    }

    pub fn ranked_names(&self) -> Vec<&str> {
        self.zones.iter().filter(|z| z.ranked).map(|z| z.zone.as_str()).collect()
    }
}

/// Averages per-predicate LRC over seeds. All graphs must share one
/// predicate set.
pub fn aggregate_seeds(graphs: &[ExplanationGraph]) -> PredicateRanking {
    let n = graphs.first().map_or(0, |g| g.n_predicates);
    debug_assert!(graphs.iter().all(|g| g.n_predicates == n));
    let per_graph: Vec<Vec<f64>> = graphs.iter().map(lrc_all).collect();
    let mut entries: Vec<RankedPredicate> = (0..n)
        .map(|j| {
            let per_seed: Vec<f64> = per_graph.iter().map(|l| l[j]).collect();
            let mean_lrc = if per_seed.is_empty() {
                0.0
            } else {
                per_seed.iter().sum::<f64>() / per_seed.len() as f64
            };
            RankedPredicate { predicate: j, mean_lrc, per_seed }
        })
        .collect();
    // stable sort keeps predicate order among ties
    entries.sort_by(|a, b| b.mean_lrc.total_cmp(&a.mean_lrc));
    PredicateRanking {
        seeds: graphs.iter().map(|g| g.seed).collect(),
        entries,
    }
}

/// Zone order by first occurrence in the predicate ranking. Only predicates
/// with positive mean LRC count; other zones follow in config order.
pub fn zone_ranking(ranking: &PredicateRanking, predicates: &PredicateSet, zones: &ZoneConfig) -> ZoneRanking {
    let mut out: Vec<RankedZone> = Vec::new();
    for e in ranking.entries.iter().filter(|e| e.mean_lrc > 0.0) {
        let zone = &predicates.predicates[e.predicate].zone;
        if !out.iter().any(|z| &z.zone == zone) {
            out.push(RankedZone {
                zone: zone.clone(),
                ranked: true,
                top_predicate: Some(e.predicate),
                mean_lrc: e.mean_lrc,
            });
        }
    }
    for z in &zones.zones {
        if !out.iter().any(|r| r.zone == z.name) {
            out.push(RankedZone {
                zone: z.name.clone(),
                ranked: false,
                top_predicate: None,
                mean_lrc: 0.0,
            });
        }
    }
    ZoneRanking { zones: out }
}
