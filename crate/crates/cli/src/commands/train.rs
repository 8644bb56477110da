use smx_core::dataio::load_csv;
use smx_core::models::{accuracy, LogisticOptions, SpectralModel};

use super::build_model;
use crate::args::TrainArgs;
use crate::manifest::ModelSpec;
use crate::output::write_atomic;
use crate::{usage, CliResult};

pub fn cmd_train(args: &TrainArgs) -> CliResult<()> {
    let train = load_csv(&args.input)?;
    let spec = match args.model.as_str() {
        "logistic" => {
            let d = LogisticOptions::default();
            ModelSpec::Logistic { l2: args.l2, max_iters: d.max_iters, tol: d.tol }
        }
        "ridge" => ModelSpec::Ridge { lambda: args.lambda },
        other => return Err(usage(format!("unknown model '{other}' (expected logistic or ridge)"))),
    };
    let model = build_model(&spec, &train)?;
    let train_acc = accuracy(&model, train.intensities.view(), &train.labels)?;
    println!("train accuracy: {train_acc:.4}");
    if let Some(path) = &args.test {
        let test = load_csv(path)?;
        if test.n_variables() != model.n_features() {
            return Err(usage(format!(
                "test data has {} variables, model expects {}",
                test.n_variables(),
                model.n_features()
            )));
        }
        println!("test accuracy: {:.4}", accuracy(&model, test.intensities.view(), &test.labels)?);
    }
    let dump = model.dump().expect("builtin models have dumps");
    let mut text = serde_json::to_string_pretty(&dump)?;
    text.push('\n');
    write_atomic(&args.out, text)?;
    Ok(())
}
