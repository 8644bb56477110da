use smx_core::dataio::{apply_preprocess, fit_preprocess, load_csv, write_csv, PreprocessMethod, PreprocessState};

use crate::args::PreprocessArgs;
use crate::output::write_atomic;
use crate::{usage, CliResult};

pub fn parse_method(name: &str, window: usize, order: usize) -> CliResult<PreprocessMethod> {
    Ok(match name {
        "mean_center" => PreprocessMethod::MeanCenter,
        "poisson_then_center" => PreprocessMethod::PoissonThenCenter,
        "savgol_then_center" => PreprocessMethod::SavgolThenCenter { window, order },
        other => {
            return Err(usage(format!(
                "unknown method '{other}' (expected mean_center, poisson_then_center or savgol_then_center)"
            )))
        }
    })
}

pub fn cmd_preprocess(args: &PreprocessArgs) -> CliResult<()> {
    let ds = load_csv(&args.input)?;
    let state = match (&args.method, &args.state) {
        (Some(m), None) => fit_preprocess(&ds, parse_method(m, args.window, args.order)?)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read state {}: {e}", path.display())))?;
            let state: PreprocessState = serde_json::from_str(&text)
                .map_err(|e| usage(format!("invalid state {}: {e}", path.display())))?;
            state.validate()?;
            state
        }
        _ => return Err(usage("give either --method (to fit) or --state (to apply)".into())),
    };
    let out = apply_preprocess(&state, &ds)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &out)?;
    write_atomic(&args.out, buf)?;
    if let Some(path) = &args.state_out {
        let mut text = serde_json::to_string_pretty(&state)?;
        text.push('\n');
        write_atomic(path, text)?;
    }
    Ok(())
}
