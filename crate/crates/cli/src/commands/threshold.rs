use std::fmt::Write;

use smx_core::exec::Execution;
use smx_core::numfmt::g17;
use smx_core::pipeline::Explainer;
use smx_core::zone::ThresholdSpectrum;

use super::Prepared;
use crate::args::ThresholdArgs;
use crate::manifest::RunManifest;
use crate::output::write_atomic;
use crate::{usage, CliResult};

/// `axis,profile,profile_input_units` over the zone's variables.
pub fn spectrum_csv(ts: &ThresholdSpectrum, indices: &[usize], prep: &Prepared) -> String {
    let mut out = String::from("axis,profile,profile_input_units\n");
    for (v, &j) in ts.profile.iter().zip(indices) {
        let _ = writeln!(
            out,
            "{},{},{}",
            g17(prep.train.axis[j]),
            g17(*v),
            g17(prep.state.to_input_units(j, *v))
        );
    }
    out
}

pub fn cmd_threshold_spectrum(args: &ThresholdArgs) -> CliResult<()> {
    let prep = Prepared::load(RunManifest::load(&args.manifest)?)?;
    let explainer = Explainer::fit(
        prep.train.intensities.view(),
        &prep.zone_config,
        &prep.zones,
        &prep.manifest.engine.quantiles,
        Execution::Parallel,
    )?;
    let (zone, tau) = match (&args.predicate, &args.zone, args.tau) {
        (Some(label), _, _) => {
            let p = explainer
                .predicates
                .predicates
                .iter()
                .find(|p| &p.label() == label)
                .ok_or_else(|| usage(format!("no predicate labelled '{label}'")))?;
            (p.zone.clone(), p.tau)
        }
        (None, Some(z), Some(t)) => (z.clone(), t),
        _ => return Err(usage("give --predicate, or both --zone and --tau".into())),
    };
    let m = explainer
        .zone_models
        .iter()
        .position(|zm| zm.zone_name == zone)
        .ok_or_else(|| usage(format!("unknown zone '{zone}'")))?;
    let zm = &explainer.zone_models[m];
    let csv = spectrum_csv(&zm.threshold_spectrum(tau), &zm.indices, &prep);
    match &args.out {
        Some(path) => write_atomic(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
