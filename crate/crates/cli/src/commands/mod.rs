//! One module per subcommand plus the shared manifest loading.

pub mod evaluate;
pub mod explain;
pub mod preprocess;
pub mod split;
pub mod synth;
pub mod threshold;
pub mod train;

use std::fmt::Write;

use anyhow::Context;
use smx_core::dataio::{
    apply_preprocess, fit_preprocess, load_csv, load_zone_config, resolve_zones, PreprocessState, SpectralDataset,
    ZoneConfig, ZoneIndices,
};
use smx_core::models::{fit_logistic, fit_ridge, ExternalModel, LogisticOptions, ModelHandle, SpectralModel};
use smx_core::numfmt::g17;

use crate::manifest::{ModelSpec, RunManifest};
use crate::{usage, CliResult};

/// Everything a run needs once the manifest's inputs are loaded.
pub struct Prepared {
    pub manifest: RunManifest,
    pub state: PreprocessState,
    /// Preprocessed training data.
    pub train: SpectralDataset,
    /// Preprocessed test data, if the manifest names one.
    pub test: Option<SpectralDataset>,
    pub zone_config: ZoneConfig,
    pub zones: Vec<ZoneIndices>,
    pub model: ModelHandle,
}

impl Prepared {
    pub fn load(manifest: RunManifest) -> CliResult<Prepared> {
        manifest.validate()?;
        let raw = load_csv(&manifest.train).with_context(|| format!("loading {}", manifest.train.display()))?;
        let zone_config = load_zone_config(&manifest.zones)
            .with_context(|| format!("loading zones {}", manifest.zones.display()))?;
        let state = fit_preprocess(&raw, manifest.preprocess)?;
        let train = apply_preprocess(&state, &raw)?;
        let test = match &manifest.test {
            Some(path) => {
                let raw_test = load_csv(path).with_context(|| format!("loading {}", path.display()))?;
                if raw_test.axis != raw.axis {
                    return Err(usage(format!(
                        "test axis in {} differs from the training axis",
                        path.display()
                    )));
                }
                Some(apply_preprocess(&state, &raw_test)?)
            }
            None => None,
        };
        let zones = resolve_zones(&zone_config, &train)?;
        let model = build_model(&manifest.model, &train)?;
        if model.n_features() != train.n_variables() {
            return Err(usage(format!(
                "model expects {} features but the data has {}",
                model.n_features(),
                train.n_variables()
            )));
        }
        Ok(Prepared {
            manifest,
            state,
            train,
            test,
            zone_config,
            zones,
            model,
        })
    }
}

pub fn build_model(spec: &ModelSpec, train: &SpectralDataset) -> CliResult<ModelHandle> {
    Ok(match spec {
        ModelSpec::Logistic { l2, max_iters, tol } => {
            let opts = LogisticOptions {
                l2: *l2,
                max_iters: *max_iters,
                tol: *tol,
            };
            let m = fit_logistic(train, opts)?;
            if !m.converged {
                log::warn!("logistic fit stopped after {} iterations without converging", m.iterations);
            }
            ModelHandle::Logistic(m)
        }
        ModelSpec::Ridge { lambda } => ModelHandle::Ridge(fit_ridge(train, *lambda)?),
        ModelSpec::External { command } => ModelHandle::External(ExternalModel::spawn(command)?),
        ModelSpec::File { path } => {
            ModelHandle::load_dump(path).with_context(|| format!("loading model {}", path.display()))?
        }
    })
}

/// Two-column `depth,value` CSV.
pub fn curve_csv(y: &[f64]) -> String {
    let mut out = String::from("depth,value\n");
    for (k, v) in y.iter().enumerate() {
        let _ = writeln!(out, "{},{}", k + 1, g17(*v));
    }
    out
}
