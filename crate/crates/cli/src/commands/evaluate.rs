use std::collections::HashSet;
use std::fmt::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use smx_core::engine::EngineConfig;
use smx_core::eval::{
    agreement_curve, faithfulness_curve, pfi, rank_zones_by_variables, simplicity_curve, stability_study,
    wilcoxon_signed_rank, EvalCurve, InstabilityReport, WilcoxonResult, SIMPLICITY_TOP_N,
};
use smx_core::exec::Execution;
use smx_core::models::accuracy;
use smx_core::numfmt::g17;
use smx_core::pipeline::Explainer;

use super::explain::apply_overrides;
use super::{curve_csv, Prepared};
use crate::args::EvaluateArgs;
use crate::manifest::RunManifest;
use crate::output::Staging;
use crate::{usage, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Smx,
    Pfi,
}

impl Method {
    pub fn parse(name: &str) -> CliResult<Method> {
        match name.trim().to_ascii_lowercase().as_str() {
            "smx" => Ok(Method::Smx),
            "pfi" => Ok(Method::Pfi),
            other => Err(usage(format!("unknown method '{other}' (expected smx or pfi)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Smx => "smx",
            Method::Pfi => "pfi",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub methods: Vec<Method>,
    pub k_max: usize,
    pub pfi_repeats: usize,
    pub stability_runs: usize,
    pub stability_pfi_repeats: usize,
    pub rho: f64,
    pub rbo_depth: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            methods: vec![Method::Smx, Method::Pfi],
            k_max: 9,
            pfi_repeats: 10,
            stability_runs: 10,
            stability_pfi_repeats: 4,
            rho: 0.7,
            rbo_depth: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub zone_ranking: Vec<String>,
    pub faithfulness: EvalCurve,
    pub agreement: EvalCurve,
    pub simplicity: EvalCurve,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<InstabilityReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetReport {
    pub name: String,
    pub model: String,
    pub test_accuracy: f64,
    pub methods: Vec<MethodReport>,
}

impl DatasetReport {
    pub fn method(&self, m: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|r| r.method == m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub metric: String,
    /// `"<other>-smx"`: differences are the other method minus SMX.
    pub comparison: String,
    pub differences: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<WilcoxonResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub methods: Vec<Method>,
    pub datasets: Vec<DatasetReport>,
    pub tests: Vec<PairwiseTest>,
}

/// Engine seeds for stability run `run`; run 0 keeps the configured seeds.
pub fn stability_seeds(base: &[u64], run: u64) -> Vec<u64> {
    base.iter().map(|s| s.wrapping_add(run.wrapping_mul(1_000_003))).collect()
}

/// 1 − RBO over `runs` SMX explanations, compared as predicate lists.
pub fn smx_stability(
    prep: &Prepared,
    explainer: &Explainer,
    cfg: &EngineConfig,
    runs: usize,
    rho: f64,
    depth: usize,
) -> CliResult<InstabilityReport> {
    let x = prep.train.intensities.view();
    let ids: Vec<u64> = (0..runs as u64).collect();
    Ok(stability_study(
        |run| {
            let mut c = cfg.clone();
            c.seeds = stability_seeds(&cfg.seeds, run);
            Ok(explainer.run(&prep.model, x, &c, Execution::Parallel)?.ranking.order())
        },
        &ids,
        rho,
        depth,
        Execution::Parallel,
    )?)
}

/// 1 − RBO over `runs` permutation-importance variable rankings.
pub fn pfi_stability(prep: &Prepared, repeats: usize, runs: usize, rho: f64, depth: usize) -> CliResult<InstabilityReport> {
    let test = test_set(prep)?;
    let ids: Vec<u64> = (0..runs as u64).collect();
    Ok(stability_study(
        |seed| {
            let imp = pfi(&prep.model, test.intensities.view(), repeats, seed, Execution::Parallel)?;
            let mut order: Vec<usize> = (0..imp.len()).collect();
            order.sort_by(|&a, &b| imp[b].total_cmp(&imp[a]));
            Ok(order)
        },
        &ids,
        rho,
        depth,
        Execution::Parallel,
    )?)
}

fn test_set(prep: &Prepared) -> CliResult<&smx_core::dataio::SpectralDataset> {
    prep.test
        .as_ref()
        .ok_or_else(|| usage(format!("manifest for {} has no test set", prep.manifest.train.display())))
}

fn faithfulness_or_empty(prep: &Prepared, ranking: &[String], k_max: usize) -> CliResult<EvalCurve> {
    if ranking.is_empty() {
        return Ok(EvalCurve::from_values(Vec::new()));
    }
    let test = test_set(prep)?;
    Ok(faithfulness_curve(&prep.model, test.intensities.view(), ranking, &prep.zones, k_max)?)
}

/// All metrics for one dataset and every requested method.
pub fn evaluate_dataset(name: &str, prep: &Prepared, opts: &EvalOptions) -> CliResult<DatasetReport> {
    let test = test_set(prep)?;
    let plausible: Vec<String> = prep.zone_config.zones.iter().filter(|z| z.plausible).map(|z| z.name.clone()).collect();
    let cfg = &prep.manifest.engine;
    let mut methods = Vec::new();
    for &m in &opts.methods {
        let report = match m {
            Method::Smx => {
                let x = prep.train.intensities.view();
                let explainer = Explainer::fit(x, &prep.zone_config, &prep.zones, &cfg.quantiles, Execution::Parallel)?;
                let out = explainer.run(&prep.model, x, cfg, Execution::Parallel)?;
                let ranking: Vec<String> = out.zone_ranking.ranked_names().into_iter().map(String::from).collect();
                let stability = (opts.stability_runs >= 2)
                    .then(|| smx_stability(prep, &explainer, cfg, opts.stability_runs, opts.rho, opts.rbo_depth))
                    .transpose()?;
                MethodReport {
                    method: m,
                    faithfulness: faithfulness_or_empty(prep, &ranking, opts.k_max)?,
                    agreement: agreement_curve(&ranking, &plausible, opts.k_max),
                    simplicity: simplicity_curve(&out.importances(), SIMPLICITY_TOP_N),
                    zone_ranking: ranking,
                    stability,
                }
            }
            Method::Pfi => {
                let seed = cfg.seeds[0];
                let imp = pfi(&prep.model, test.intensities.view(), opts.pfi_repeats, seed, Execution::Parallel)?;
                let ranking = rank_zones_by_variables(&imp, &prep.zones);
                let stability = (opts.stability_runs >= 2)
                    .then(|| pfi_stability(prep, opts.stability_pfi_repeats, opts.stability_runs, opts.rho, opts.rbo_depth))
                    .transpose()?;
                MethodReport {
                    method: m,
                    faithfulness: faithfulness_or_empty(prep, &ranking, opts.k_max)?,
                    agreement: agreement_curve(&ranking, &plausible, opts.k_max),
                    simplicity: simplicity_curve(&imp, SIMPLICITY_TOP_N),
                    zone_ranking: ranking,
                    stability,
                }
            }
        };
        methods.push(report);
    }
    Ok(DatasetReport {
        name: name.to_string(),
        model: prep.model.backing().to_string(),
        test_accuracy: accuracy(&prep.model, test.intensities.view(), &test.labels)?,
        methods,
    })
}

/// Per-dataset value of `metric` for `other` and SMX. Depth-dependent
/// curves are compared at their common depth.
fn paired_values(metric: &str, other: &MethodReport, smx: &MethodReport) -> Option<(f64, f64)> {
    let common = |a: &EvalCurve, b: &EvalCurve| {
        let k = a.len().min(b.len());
        (a.truncated(k).auc, b.truncated(k).auc)
    };
    match metric {
        "faithfulness_auc" => Some(common(&other.faithfulness, &smx.faithfulness)),
        "agreement_auc" => Some(common(&other.agreement, &smx.agreement)),
        "simplicity_auc" => Some((other.simplicity.auc, smx.simplicity.auc)),
        "instability_median" => match (&other.stability, &smx.stability) {
            (Some(a), Some(b)) => Some((a.median, b.median)),
            _ => None,
        },
        _ => None,
    }
}

/// Exact Wilcoxon tests of every other method against SMX across datasets.
/// Empty unless SMX and at least one other method were evaluated.
pub fn pairwise_tests(datasets: &[DatasetReport], methods: &[Method]) -> Vec<PairwiseTest> {
    let mut tests = Vec::new();
    if !methods.contains(&Method::Smx) || methods.len() < 2 {
        return tests;
    }
    for &other in methods.iter().filter(|&&m| m != Method::Smx) {
        for metric in ["faithfulness_auc", "agreement_auc", "simplicity_auc", "instability_median"] {
            let diffs: Vec<f64> = datasets
                .iter()
                .filter_map(|d| paired_values(metric, d.method(other)?, d.method(Method::Smx)?))
                .map(|(a, b)| a - b)
                .collect();
            if diffs.is_empty() {
                continue;
            }
            let (result, note) = match wilcoxon_signed_rank(&diffs) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            tests.push(PairwiseTest {
                metric: metric.to_string(),
                comparison: format!("{}-smx", other.name()),
                differences: diffs,
                result,
                note,
            });
        }
    }
    tests
}

fn tests_csv(tests: &[PairwiseTest]) -> String {
    let mut out = String::from("metric,comparison,n,statistic,p_value,median_difference,note\n");
    for t in tests {
        match &t.result {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},",
                    t.metric,
                    t.comparison,
                    r.n,
                    g17(r.statistic),
                    g17(r.p_value),
                    g17(r.median_difference)
                );
            }
            None => {
                let note = t.note.as_deref().unwrap_or("").replace('"', "'");
                let _ = writeln!(out, "{},{},{},,,,\"{note}\"", t.metric, t.comparison, t.differences.len());
            }
        }
    }
    out
}

fn stability_csv(r: &InstabilityReport) -> String {
    let mut out = String::from("run_a,run_b,instability\n");
    let mut k = 0;
    for a in 0..r.seeds.len() {
        for b in a + 1..r.seeds.len() {
            let _ = writeln!(out, "{},{},{}", r.seeds[a], r.seeds[b], g17(r.pairwise[k]));
            k += 1;
        }
    }
    out
}

fn dataset_names(paths: &[std::path::PathBuf]) -> Vec<String> {
    let mut seen = HashSet::new();
    paths
        .iter()
        .map(|p| {
            let stem = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into());
            let mut name = stem.clone();
            let mut i = 2;
            while !seen.insert(name.clone()) {
                name = format!("{stem}_{i}");
                i += 1;
            }
            name
        })
        .collect()
}

/// Writes `report.json`, `tests.csv` and per-curve CSVs into `dir`.
pub fn write_report(dir: &Path, report: &EvaluationReport) -> CliResult<()> {
    let mut stage = Staging::new(dir)?;
    stage.write_json("report.json", report)?;
    stage.write("tests.csv", tests_csv(&report.tests))?;
    for d in &report.datasets {
        for m in &d.methods {
            let base = format!("{}/{}", d.name, m.method.name());
            stage.write(format!("{base}_faithfulness.csv"), curve_csv(&m.faithfulness.y))?;
            stage.write(format!("{base}_agreement.csv"), curve_csv(&m.agreement.y))?;
            stage.write(format!("{base}_simplicity.csv"), curve_csv(&m.simplicity.y))?;
            if let Some(s) = &m.stability {
                stage.write(format!("{base}_stability.csv"), stability_csv(s))?;
            }
        }
    }
    stage.commit()?;
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<EvaluationReport> {
    let mut methods = Vec::new();
    for m in &args.methods {
        let m = Method::parse(m)?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if !(args.rho > 0.0 && args.rho < 1.0) {
        return Err(usage(format!("--rho must lie in (0, 1), got {}", args.rho)));
    }
    let opts = EvalOptions {
        methods: methods.clone(),
        k_max: args.k_max,
        pfi_repeats: args.pfi_repeats,
        stability_runs: args.stability_runs,
        stability_pfi_repeats: args.stability_pfi_repeats,
        rho: args.rho,
        rbo_depth: args.rbo_depth,
    };
    let names = dataset_names(&args.manifest);
    let mut datasets = Vec::with_capacity(names.len());
    for (path, name) in args.manifest.iter().zip(&names) {
        let mut manifest = RunManifest::load(path)?;
        apply_overrides(&mut manifest.engine, &args.engine);
        let prep = Prepared::load(manifest)?;
        log::info!("evaluating {name}");
        datasets.push(evaluate_dataset(name, &prep, &opts)?);
    }
    let tests = pairwise_tests(&datasets, &methods);
    let report = EvaluationReport { methods, datasets, tests };
    write_report(&args.output, &report)?;
    for t in &report.tests {
        match &t.result {
            Some(r) => println!("{:<20} {:<8} n={} W={} p={:.4}", t.metric, t.comparison, r.n, r.statistic, r.p_value),
            None => println!("{:<20} {:<8} skipped: {}", t.metric, t.comparison, t.note.as_deref().unwrap_or("")),
        }
    }
    println!("wrote report to {}", args.output.display());
    Ok(report)
}
