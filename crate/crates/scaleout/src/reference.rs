//! Measured scaling factors of the reference cluster (8 GPUs per server,
//! 100 Gbps), bundled as CSV for comparison overlays.

use std::io::{Read, Write};

use scaleout_core::ReferencePoint;
use serde::Deserialize;

pub const REFERENCE_CSV: &str = include_str!("../data/reference.csv");

#[derive(Debug, Deserialize)]
struct Record {
    model: String,
    servers: u32,
    bandwidth_bps: f64,
    scaling_factor: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum ReferenceError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Invalid(#[from] scaleout_core::Error),
}

pub fn read_reference<R: Read>(reader: R) -> Result<Vec<ReferencePoint>, ReferenceError> {
    csv::Reader::from_reader(reader)
        .deserialize::<Record>()
        .map(|r| {
            let r = r?;
            Ok(ReferencePoint::new(
                r.model,
                r.servers,
                r.bandwidth_bps,
                r.scaling_factor,
            )?)
        })
        .collect()
}

/// Writes points in the bundled layout; floats use the shortest
/// representation that parses back to the same value.
pub fn write_reference<W: Write>(points: &[ReferencePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "model,servers,bandwidth_bps,scaling_factor")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            p.model, p.servers, p.bandwidth_bps, p.measured_scaling_factor
        )?;
    }
    Ok(())
}

/// The nine bundled measurements: three models at 2, 4 and 8 servers.
pub fn load_reference_data() -> Vec<ReferencePoint> {
    read_reference(REFERENCE_CSV.as_bytes()).expect("bundled reference CSV is valid")
}

pub fn lookup<'a>(
    points: &'a [ReferencePoint],
    model: &str,
    servers: u32,
) -> Option<&'a ReferencePoint> {
    points
        .iter()
        .find(|p| p.model == model && p.servers == servers)
}
