use smx_core::dataio::{kennard_stone_split, load_csv, write_csv, SpectralDataset};

use crate::args::SplitArgs;
use crate::output::write_atomic;
use crate::CliResult;

fn csv_bytes(ds: &SpectralDataset) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(&mut buf, ds)?;
    Ok(buf)
}

pub fn cmd_split(args: &SplitArgs) -> CliResult<()> {
    let ds = load_csv(&args.input)?;
    let (train, test) = kennard_stone_split(&ds, args.train_fraction)?;
    let (a, b) = (csv_bytes(&train)?, csv_bytes(&test)?);
    write_atomic(&args.train_out, a)?;
    write_atomic(&args.test_out, b)?;
    log::info!("split {} samples into {} train / {} test", ds.n_samples(), train.n_samples(), test.n_samples());
    Ok(())
}
