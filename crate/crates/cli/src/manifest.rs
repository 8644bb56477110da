use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smx_core::dataio::PreprocessMethod;
use smx_core::engine::EngineConfig;
use smx_core::models::LogisticOptions;

use crate::{usage, CliResult};

/// How to obtain the model under explanation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Logistic {
        #[serde(default = "default_l2")]
        l2: f64,
        #[serde(default = "default_max_iters")]
        max_iters: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Ridge {
        #[serde(default = "default_lambda")]
        lambda: f64,
    },
    /// A child process speaking the line-delimited JSON protocol.
    External { command: Vec<String> },
    /// A weight dump written by `smx train`.
    File { path: PathBuf },
}

fn default_l2() -> f64 {
    LogisticOptions::default().l2
}

fn default_max_iters() -> usize {
    LogisticOptions::default().max_iters
}

fn default_tol() -> f64 {
    LogisticOptions::default().tol
}

fn default_lambda() -> f64 {
    1.0
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Logistic {
            l2: default_l2(),
            max_iters: default_max_iters(),
            tol: default_tol(),
        }
    }
}

impl ModelSpec {
    /// `logistic`, `ridge` or a dump path.
    pub fn from_flag(flag: &str) -> ModelSpec {
        match flag {
            "logistic" => ModelSpec::default(),
            "ridge" => ModelSpec::Ridge { lambda: default_lambda() },
            path => ModelSpec::File { path: PathBuf::from(path) },
        }
    }
}

fn default_preprocess() -> PreprocessMethod {
    PreprocessMethod::MeanCenter
}

/// Inputs, model, engine settings and output location of one run. Relative
/// paths are taken from the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub train: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    pub zones: PathBuf,
    #[serde(default = "default_preprocess")]
    pub preprocess: PreprocessMethod,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub engine: EngineConfig,
    pub output: PathBuf,
}

impl RunManifest {
    pub fn load(path: &Path) -> CliResult<RunManifest> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read manifest {}: {e}", path.display())))?;
        let mut m: RunManifest = serde_json::from_str(&text)
            .map_err(|e| usage(format!("invalid manifest {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        m.rebase(base);
        Ok(m)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.train);
        if let Some(t) = &mut self.test {
            fix(t);
        }
        fix(&mut self.zones);
        fix(&mut self.output);
        if let ModelSpec::File { path } = &mut self.model {
            fix(path);
        }
    }

    /// Checks that inputs exist and the engine settings are valid.
    pub fn validate(&self) -> CliResult<()> {
        let must_exist = |p: &Path, what: &str| {
            if p.is_file() {
                Ok(())
            } else {
                Err(usage(format!("{what} file not found: {}", p.display())))
            }
        };
        must_exist(&self.train, "training data")?;
        if let Some(t) = &self.test {
            must_exist(t, "test data")?;
        }
        must_exist(&self.zones, "zone config")?;
        if let ModelSpec::File { path } = &self.model {
            must_exist(path, "model")?;
        }
        if let ModelSpec::External { command } = &self.model {
            if command.is_empty() {
                return Err(usage("external model command is empty".into()));
            }
        }
        self.engine.validate()?;
        Ok(())
    }
}
