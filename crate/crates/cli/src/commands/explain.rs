use std::fmt::Write;
use std::path::PathBuf;

use serde::Serialize;
use smx_core::engine::EngineConfig;
use smx_core::exec::Execution;
use smx_core::graph::{graph_json, ranking_csv, to_dot, zone_ranking_csv};
use smx_core::models::accuracy;
use smx_core::pipeline::{Explainer, Explanation};
use smx_core::predicates::Direction;

use super::threshold::spectrum_csv;
use super::Prepared;
use crate::args::{EngineOverrides, ExplainArgs};
use crate::manifest::{ModelSpec, RunManifest};
use crate::output::Staging;
use crate::{usage, CliResult};

pub fn apply_overrides(engine: &mut EngineConfig, o: &EngineOverrides) {
    if let Some(s) = &o.seeds {
        engine.seeds = s.clone();
    }
    if let Some(b) = o.bags {
        engine.bags = b;
    }
    if let Some(f) = o.bag_fraction {
        engine.bag_fraction = f;
    }
    if let Some(q) = &o.quantiles {
        engine.quantiles = q.clone();
    }
    if let Some(m) = o.min_support {
        engine.min_support_fraction = m;
    }
}

/// The manifest named by `--manifest` with flag overrides applied, or one
/// built from flags alone.
pub fn manifest_from_args(args: &ExplainArgs) -> CliResult<RunManifest> {
    let mut m = match &args.manifest {
        Some(path) => RunManifest::load(path)?,
        None => {
            let missing = |f: &str| usage(format!("--{f} is required without --manifest"));
            RunManifest {
                train: args.train.clone().ok_or_else(|| missing("train"))?,
                test: None,
                zones: args.zones.clone().ok_or_else(|| missing("zones"))?,
                preprocess: smx_core::dataio::PreprocessMethod::MeanCenter,
                model: ModelSpec::default(),
                engine: EngineConfig::default(),
                output: args.output.clone().ok_or_else(|| missing("output"))?,
            }
        }
    };
    if let Some(t) = &args.train {
        m.train = t.clone();
    }
    if let Some(z) = &args.zones {
        m.zones = z.clone();
    }
    if let Some(o) = &args.output {
        m.output = o.clone();
    }
    if let Some(model) = &args.model {
        m.model = ModelSpec::from_flag(model);
    }
    apply_overrides(&mut m.engine, &args.engine);
    Ok(m)
}

#[derive(Serialize)]
struct PredicateRecord<'a> {
    index: usize,
    label: String,
    zone: &'a str,
    direction: Direction,
    tau: f64,
    quantile_level: f64,
    support: usize,
}

#[derive(Serialize)]
struct ZoneModelRecord<'a> {
    zone: &'a str,
    axis_start: f64,
    axis_end: f64,
    n_variables: usize,
    variance_explained: f64,
    mean: &'a [f64],
    loading: &'a [f64],
}

#[derive(Serialize)]
struct RunSummary<'a> {
    model: &'a str,
    n_train: usize,
    n_variables: usize,
    train_accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    test_accuracy: Option<f64>,
    engine: &'a EngineConfig,
    n_predicates: usize,
    zone_ranking: Vec<&'a str>,
    top_predicates: Vec<String>,
}

/// Writes every explain artifact into `prep.manifest.output`, all or
/// nothing.
pub fn write_outputs(prep: &Prepared, explainer: &Explainer, out: &Explanation) -> CliResult<Vec<PathBuf>> {
    let preds = &explainer.predicates;
    let mut stage = Staging::new(&prep.manifest.output)?;
    stage.write("predicate_ranking.csv", ranking_csv(&out.ranking, preds))?;
    stage.write("zone_ranking.csv", zone_ranking_csv(&out.zone_ranking, preds))?;
    for g in &out.graphs {
        stage.write(format!("graphs/seed_{}.dot", g.seed), to_dot(g, preds))?;
        stage.write_json(format!("graphs/seed_{}.json", g.seed), &graph_json(g, preds))?;
    }
    let mut trace = String::new();
    for rec in out.trace() {
        trace.push_str(&serde_json::to_string(&rec)?);
        trace.push('\n');
    }
    stage.write("bag_trace.jsonl", trace)?;

    let records: Vec<PredicateRecord> = preds
        .predicates
        .iter()
        .enumerate()
        .map(|(j, p)| PredicateRecord {
            index: j,
            label: p.label(),
            zone: &p.zone,
            direction: p.direction,
            tau: p.tau,
            quantile_level: p.quantile_level,
            support: preds.indicator.column(j).iter().filter(|&&b| b).count(),
        })
        .collect();
    stage.write_json("predicates.json", &records)?;
    let zone_records: Vec<ZoneModelRecord> = explainer
        .zone_models
        .iter()
        .zip(&prep.zone_config.zones)
        .map(|(zm, z)| ZoneModelRecord {
            zone: &zm.zone_name,
            axis_start: z.start,
            axis_end: z.end,
            n_variables: zm.dim(),
            variance_explained: zm.variance_explained,
            mean: &zm.mean,
            loading: &zm.loading,
        })
        .collect();
    stage.write_json("zone_models.json", &zone_records)?;

    let mut index = String::from("predicate,file,label,zone,direction,tau\n");
    for (j, (p, ts)) in preds.predicates.iter().zip(explainer.threshold_spectra()).enumerate() {
        let file = format!("p{j:03}.csv");
        let zm = &explainer.zone_models[p.zone_index];
        stage.write(format!("threshold_spectra/{file}"), spectrum_csv(&ts, &zm.indices, prep))?;
        let _ = writeln!(
            index,
            "{j},{file},\"{}\",\"{}\",{},{}",
            p.label().replace('"', "\"\""),
            p.zone.replace('"', "\"\""),
            p.direction.symbol(),
            smx_core::numfmt::g17(p.tau)
        );
    }
    stage.write("threshold_spectra/index.csv", index)?;

    stage.write_json("preprocess.json", &prep.state)?;
    if let Some(dump) = prep.model.dump() {
        stage.write_json("model.json", &dump)?;
    }
    let summary = RunSummary {
        model: prep.model.backing(),
        n_train: prep.train.n_samples(),
        n_variables: prep.train.n_variables(),
        train_accuracy: accuracy(&prep.model, prep.train.intensities.view(), &prep.train.labels)?,
        test_accuracy: match &prep.test {
            Some(t) => Some(accuracy(&prep.model, t.intensities.view(), &t.labels)?),
            None => None,
        },
        engine: &prep.manifest.engine,
        n_predicates: preds.len(),
        zone_ranking: out.zone_ranking.ranked_names(),
        top_predicates: out.ranked_labels(preds).into_iter().take(10).collect(),
    };
    stage.write_json("summary.json", &summary)?;
    stage.commit()
}

/// Runs the explainer for one manifest and returns the written paths.
pub fn cmd_explain(args: &ExplainArgs) -> CliResult<Vec<PathBuf>> {
    let prep = Prepared::load(manifest_from_args(args)?)?;
    let cfg = &prep.manifest.engine;
    let x = prep.train.intensities.view();
    let explainer = Explainer::fit(x, &prep.zone_config, &prep.zones, &cfg.quantiles, Execution::Parallel)?;
    let out = explainer.run(&prep.model, x, cfg, Execution::Parallel)?;
    let files = write_outputs(&prep, &explainer, &out)?;
    for (i, label) in out.ranked_labels(&explainer.predicates).iter().take(5).enumerate() {
        println!("{:>2}. {label}  (LRC {:.5})", i + 1, out.ranking.entries[i].mean_lrc);
    }
    println!("zones: {}", out.zone_ranking.ranked_names().join(" > "));
    println!("wrote {} files to {}", files.len(), prep.manifest.output.display());
    Ok(files)
}
