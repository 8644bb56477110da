//! Library side of the `smx` command-line tool: argument types, run
//! manifests, atomic output staging and one function per subcommand.

pub mod args;
pub mod commands;
pub mod manifest;
pub mod output;

use smx_core::SmxError;

pub use args::Cli;

/// Problems with how the tool was invoked: bad flags, missing inputs,
/// invalid manifests. Mapped to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub type CliResult<T> = anyhow::Result<T>;

pub fn usage(msg: String) -> anyhow::Error {
    UsageError(msg).into()
}

/// 2 for usage and configuration errors, 1 for anything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<SmxError>() {
            return if e.is_config() { 2 } else { 1 };
        }
    }
    1
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    use args::Command;
    match cli.command {
        Command::Synth(a) => commands::synth::cmd_synth(&a),
        Command::Split(a) => commands::split::cmd_split(&a),
        Command::Preprocess(a) => commands::preprocess::cmd_preprocess(&a),
        Command::Train(a) => commands::train::cmd_train(&a),
        Command::Explain(a) => commands::explain::cmd_explain(&a).map(|_| ()),
        Command::Evaluate(a) => commands::evaluate::cmd_evaluate(&a).map(|_| ()),
        Command::ThresholdSpectrum(a) => commands::threshold::cmd_threshold_spectrum(&a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&usage("x".into())), 2);
        assert_eq!(exit_code(&anyhow::Error::from(SmxError::Config("bad".into()))), 2);
        assert_eq!(exit_code(&anyhow::Error::from(SmxError::Model("boom".into()))), 1);
        let wrapped = anyhow::Error::from(SmxError::Numerical("nan".into())).context("running explain");
        assert_eq!(exit_code(&wrapped), 1);
        assert_eq!(exit_code(&anyhow::anyhow!("plain")), 1);
    }
}
