//! Two-column CSV (`size_bytes,seconds`) for calibrated add-cost tables.

use std::io::{Read, Write};

use scaleout_core::AddCostModel;

#[derive(Debug, thiserror::Error)]
pub enum AddCsvError {
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] scaleout_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Reads an add-cost table. A first row that is not numeric is treated as a
/// header.
pub fn read_add_model<R: Read>(reader: R) -> Result<AddCostModel, AddCsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut samples = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != 2 {
            return Err(AddCsvError::Row {
                row,
                message: format!("expected 2 columns, found {}", rec.len()),
            });
        }
        let size = rec[0].parse::<u64>();
        let secs = rec[1].parse::<f64>();
        match (size, secs) {
            (Ok(s), Ok(d)) => samples.push((s, d)),
            _ if row == 1 => continue,
            _ => {
                return Err(AddCsvError::Row {
                    row,
                    message: format!(
                        "expected `size_bytes,seconds`, found `{},{}`",
                        &rec[0], &rec[1]
                    ),
                })
            }
        }
    }
    Ok(AddCostModel::new(samples)?)
}

pub fn write_add_model<W: Write>(model: &AddCostModel, mut out: W) -> std::io::Result<()> {
    writeln!(out, "size_bytes,seconds")?;
    for (s, d) in model.samples() {
        writeln!(out, "{s},{d}")?;
    }
    Ok(())
}
