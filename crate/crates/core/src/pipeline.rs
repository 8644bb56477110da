//! End-to-end explanation: zone PCA, predicates, bags per seed, graphs,
//! centrality and rankings.

use ndarray::ArrayView2;

use crate::dataio::{ZoneConfig, ZoneIndices};
use crate::engine::{trace_records, BagContext, BagResult, EngineConfig, TraceRecord};
use crate::error::{Result, SmxError};
use crate::exec::Execution;
use crate::graph::{aggregate_seeds, build_graph, zone_ranking, ExplanationGraph, PredicateRanking, ZoneRanking};
use crate::models::SpectralModel;
use crate::predicates::{build_predicates, PredicateSet};
use crate::zone::{fit_zones, score_matrix, ThresholdSpectrum, ZoneModel};

/// Seed-independent state: zone models and the predicate set fitted on
/// the (preprocessed) training matrix.
#[derive(Debug, Clone)]
pub struct Explainer {
    pub zone_config: ZoneConfig,
    pub zone_models: Vec<ZoneModel>,
    pub predicates: PredicateSet,
}

/// Output of one explanation run.
#[derive(Debug, Clone)]
pub struct Explanation {
    pub seeds: Vec<u64>,
    /// Bag results per seed, in seed order.
    pub bags: Vec<Vec<BagResult>>,
    pub graphs: Vec<ExplanationGraph>,
    pub ranking: PredicateRanking,
    pub zone_ranking: ZoneRanking,
}

impl Explainer {
    pub fn fit(
        x: ArrayView2<f64>,
        zone_config: &ZoneConfig,
        zones: &[ZoneIndices],
        quantiles: &[f64],
        exec: Execution,
    ) -> Result<Self> {
        if zones.len() != zone_config.zones.len() {
            return Err(SmxError::Dimension {
                expected: zone_config.zones.len(),
                got: zones.len(),
                context: "resolved zones vs zone config",
            });
        }
        let zone_models = fit_zones(x, zones, exec)?;
        let scores = score_matrix(&zone_models, x)?;
        let predicates = build_predicates(&scores, &zone_models, quantiles)?;
        Ok(Explainer {
            zone_config: zone_config.clone(),
            zone_models,
            predicates,
        })
    }

    /// Runs every seed of `cfg` and aggregates. `x` must be the matrix the
    /// explainer was fitted on.
    pub fn run(&self, model: &dyn SpectralModel, x: ArrayView2<f64>, cfg: &EngineConfig, exec: Execution) -> Result<Explanation> {
        cfg.validate()?;
        let ctx = BagContext::new(model, x, &self.zone_models, &self.predicates)?;
        let bags = exec.try_map(cfg.seeds.len(), |s| ctx.run(cfg, cfg.seeds[s], exec))?;
        let graphs: Vec<ExplanationGraph> = cfg
            .seeds
            .iter()
            .zip(&bags)
            .map(|(&seed, b)| build_graph(b, &self.zone_models, &self.predicates, seed))
            .collect();
        let ranking = aggregate_seeds(&graphs);
        let zone_ranking = zone_ranking(&ranking, &self.predicates, &self.zone_config);
        Ok(Explanation {
            seeds: cfg.seeds.clone(),
            bags,
            graphs,
            ranking,
            zone_ranking,
        })
    }

    /// Back-projected boundary of every predicate, in predicate set order.
    pub fn threshold_spectra(&self) -> Vec<ThresholdSpectrum> {
        self.predicates
            .predicates
            .iter()
            .map(|p| self.zone_models[p.zone_index].threshold_spectrum(p.tau))
            .collect()
    }
}

impl Explanation {
    /// Predicate labels in rank order.
    pub fn ranked_labels(&self, predicates: &PredicateSet) -> Vec<String> {
        self.ranking
            .entries
            .iter()
            .map(|e| predicates.predicates[e.predicate].label())
            .collect()
    }

    /// Mean LRC per predicate in rank order.
    pub fn importances(&self) -> Vec<f64> {
        self.ranking.entries.iter().map(|e| e.mean_lrc).collect()
    }

    pub fn trace(&self) -> Vec<TraceRecord> {
        self.seeds
            .iter()
            .zip(&self.bags)
            .flat_map(|(&s, b)| trace_records(s, b))
            .collect()
    }
}

/// Fits and runs in one call.
pub fn explain(
    model: &dyn SpectralModel,
    x: ArrayView2<f64>,
    zone_config: &ZoneConfig,
    zones: &[ZoneIndices],
    cfg: &EngineConfig,
    exec: Execution,
) -> Result<(Explainer, Explanation)> {
    cfg.validate()?;
    let explainer = Explainer::fit(x, zone_config, zones, &cfg.quantiles, exec)?;
    let explanation = explainer.run(model, x, cfg, exec)?;
    Ok((explainer, explanation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{resolve_zones, Zone};
    use crate::models::RidgeModel;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Array2<f64>, ZoneConfig, Vec<ZoneIndices>) {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Array2::from_shape_fn((60, 9), |_| rng.random_range(-1.0..1.0));
        let cfg = ZoneConfig::new(vec![
            Zone { name: "a".into(), start: 0.0, end: 2.0, plausible: true },
            Zone { name: "b".into(), start: 3.0, end: 5.0, plausible: false },
            Zone { name: "c".into(), start: 6.0, end: 8.0, plausible: false },
        ])
        .unwrap();
        let ds = crate::dataio::SpectralDataset::new(
            (0..9).map(|v| v as f64).collect(),
            x.clone(),
            (0..60).map(|i| (i % 2) as u8).collect(),
            (0..60).map(|i| format!("s{i}")).collect(),
        )
        .unwrap();
        let idx = resolve_zones(&cfg, &ds).unwrap();
        (x, cfg, idx)
    }

    #[test]
    fn dominant_zone_ranks_first() {
        let (x, zc, zi) = setup();
        let model = RidgeModel::from_weights(vec![0.0, 0.0, 0.0, 3.0, 3.0, 3.0, 0.2, 0.2, 0.2], 0.5);
        let cfg = EngineConfig::default();
        let (ex, out) = explain(&model, x.view(), &zc, &zi, &cfg, Execution::Parallel).unwrap();
        assert_eq!(out.zone_ranking.zones[0].zone, "b");
        assert_eq!(out.graphs.len(), 4);
        assert_eq!(out.ranking.entries.len(), ex.predicates.len());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let (x, zc, zi) = setup();
        let model = RidgeModel::from_weights(vec![1.0, -1.0, 0.5, 2.0, 0.0, 1.0, 0.2, 0.7, 0.1], 0.0);
        let cfg = EngineConfig::default();
        let (_, a) = explain(&model, x.view(), &zc, &zi, &cfg, Execution::Sequential).unwrap();
        let (_, b) = explain(&model, x.view(), &zc, &zi, &cfg, Execution::Parallel).unwrap();
        assert_eq!(a.ranking, b.ranking);
        assert_eq!(a.trace(), b.trace());
    }

    #[test]
    fn threshold_spectra_round_trip() {
        let (x, zc, zi) = setup();
        let ex = Explainer::fit(x.view(), &zc, &zi, &[0.2, 0.4, 0.6, 0.8], Execution::Sequential).unwrap();
        for (p, ts) in ex.predicates.predicates.iter().zip(ex.threshold_spectra()) {
            let zm = &ex.zone_models[p.zone_index];
            let back = zm.score(Array2::from_shape_vec((1, ts.profile.len()), ts.profile).unwrap().view()).unwrap();
            assert!((back[0] - p.tau).abs() < 1e-9);
        }
    }
}
