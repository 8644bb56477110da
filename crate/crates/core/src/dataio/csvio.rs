use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::SpectralDataset;
use crate::error::{Result, SmxError};
use crate::numfmt::g17;

/// Reads a dataset from `id,label,<axis...>` CSV.
pub fn load_csv(path: impl AsRef<Path>) -> Result<SpectralDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| SmxError::io(path, e))?;
    read_csv(file)
}

pub fn read_csv<R: Read>(reader: R) -> Result<SpectralDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_err(1, e))?,
        None => return Err(SmxError::Format("empty file".into())),
    };
    if header.len() < 3 {
        return Err(SmxError::Format(
            "header must be id,label followed by at least one axis value".into(),
        ));
    }
    if !header[0].eq_ignore_ascii_case("id") || !header[1].eq_ignore_ascii_case("label") {
        return Err(SmxError::Format(format!(
            "header must start with 'id,label', found '{},{}'",
            &header[0], &header[1]
        )));
    }
    let axis = header
        .iter()
        .enumerate()
        .skip(2)
        .map(|(c, tok)| parse_f64(tok, 1, c + 1))
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = axis.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(SmxError::Format(format!(
            "axis not strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    let p = axis.len();

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut ids = Vec::new();
    for (k, rec) in records.enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| csv_err(row, e))?;
        if rec.len() != p + 2 {
            return Err(SmxError::Parse {
                row,
                column: rec.len().min(p + 2),
                message: format!("expected {} fields, found {}", p + 2, rec.len()),
            });
        }
        ids.push(rec[0].to_string());
        let label: u8 = match &rec[1] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(SmxError::Parse {
                    row,
                    column: 2,
                    message: format!("label must be 0 or 1, found '{other}'"),
                })
            }
        };
        labels.push(label);
        for (c, tok) in rec.iter().enumerate().skip(2) {
            values.push(parse_f64(tok, row, c + 1)?);
        }
    }
    let n = labels.len();
    let intensities = Array2::from_shape_vec((n, p), values)
        .map_err(|e| SmxError::Format(e.to_string()))?;
    SpectralDataset::new(axis, intensities, labels, ids)
}

fn parse_f64(tok: &str, row: usize, column: usize) -> Result<f64> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(SmxError::Parse {
            row,
            column,
            message: format!("'{tok}' is not a finite number"),
        }),
    }
}

fn csv_err(row: usize, e: csv::Error) -> SmxError {
    SmxError::Parse {
        row,
        column: 0,
        message: e.to_string(),
    }
}

pub fn save_csv(path: impl AsRef<Path>, ds: &SpectralDataset) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| SmxError::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), ds).map_err(|e| match e {
        SmxError::Format(m) => SmxError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Writes `ds` with every number as 17-significant-digit decimal text.
pub fn write_csv<W: Write>(writer: W, ds: &SpectralDataset) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(writer);
    let mut header = vec!["id".to_string(), "label".to_string()];
    header.extend(ds.axis.iter().map(|&a| g17(a)));
    w.write_record(&header).map_err(write_err)?;
    for (i, row) in ds.intensities.outer_iter().enumerate() {
        let mut rec = Vec::with_capacity(row.len() + 2);
        rec.push(ds.sample_ids[i].clone());
        rec.push(ds.labels[i].to_string());
        rec.extend(row.iter().map(|&v| g17(v)));
        w.write_record(&rec).map_err(write_err)?;
    }
    w.flush()
        .map_err(|e| SmxError::Format(format!("write failed: {e}")))?;
    Ok(())
}

fn write_err(e: csv::Error) -> SmxError {
    SmxError::Format(format!("write failed: {e}"))
}
