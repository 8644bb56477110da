//! Zone-level, model-agnostic global explanations for binary spectral
//! classifiers.
//!
//! Spectra are split into expert-defined zones, each summarized by its
//! first principal component. Quantile thresholds on those scores give
//! logical predicates whose impact on the model is measured by perturbing
//! the zone in random subsamples. Per-bag predicate rankings are merged
//! into a weighted directed graph and predicates are ranked by Local
//! Reaching Centrality.
//!
//! ```no_run
//! use smx_core::prelude::*;
//!
//! let data = generate(&SyntheticConfig::default())?;
//! let zones = default_zone_config();
//! let idx = resolve_zones(&zones, &data)?;
//! let model = fit_logistic(&data, LogisticOptions::default())?;
//! let (_, out) = explain(&model, data.intensities.view(), &zones, &idx, &EngineConfig::default(), Execution::Parallel)?;
//! println!("{:?}", out.zone_ranking.names());
//! # Ok::<(), smx_core::SmxError>(())
//! ```

pub mod dataio;
pub mod engine;
mod error;
pub mod eval;
pub mod exec;
pub mod graph;
pub mod models;
pub mod numfmt;
pub mod pipeline;
pub mod predicates;
pub mod synth;
pub mod zone;

pub use error::{Result, SmxError};

pub mod prelude {
    pub use crate::dataio::{
        apply_preprocess, fit_preprocess, kennard_stone_split, load_csv, load_zone_config, resolve_zones, save_csv,
        PreprocessMethod, PreprocessState, SpectralDataset, Zone, ZoneConfig, ZoneIndices,
    };
    pub use crate::engine::EngineConfig;
    pub use crate::exec::Execution;
    pub use crate::models::{fit_logistic, fit_ridge, LogisticOptions, ModelHandle, SpectralModel};
    pub use crate::pipeline::{explain, Explainer, Explanation};
    pub use crate::synth::{default_zone_config, generate, SyntheticConfig};
    pub use crate::{Result, SmxError};
}
