use anyhow::Context;
use smx_core::dataio::write_csv;
use smx_core::synth::{default_zone_config, generate, SyntheticConfig};

use crate::args::SynthArgs;
use crate::output::write_atomic;
use crate::{usage, CliResult};

pub fn cmd_synth(args: &SynthArgs) -> CliResult<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read generator config {}: {e}", path.display())))?;
            serde_json::from_str::<SyntheticConfig>(&text)
                .map_err(|e| usage(format!("invalid generator config {}: {e}", path.display())))?
        }
        None => SyntheticConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let ds = generate(&cfg)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &ds)?;
    write_atomic(&args.out, buf).with_context(|| format!("writing {}", args.out.display()))?;
    if let Some(path) = &args.write_zones {
        let mut text = serde_json::to_string_pretty(&default_zone_config())?;
        text.push('\n');
        write_atomic(path, text)?;
    }
    log::info!("wrote {} x {} spectra to {}", ds.n_samples(), ds.n_variables(), args.out.display());
    Ok(())
}
