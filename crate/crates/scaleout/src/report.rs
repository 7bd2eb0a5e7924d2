//! Text reports and CSV emitters.
//!
//! CSV bodies are a pure function of their inputs. Run metadata (timestamp,
//! configuration digest, tool version) is confined to leading `#` lines.

use std::io::{self, Write};

use scaleout_core::{FlushBatch, SimConfig, SimResult, SweepRow};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Column order of sweep CSV output.
pub const SWEEP_COLUMNS: [&str; 7] = [
    "model",
    "n_workers",
    "bandwidth_bps",
    "compression_ratio",
    "f_sim",
    "t_overhead_s",
    "reference_f",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub timestamp: String,
    pub config_digest: String,
    pub tool_version: String,
}

impl Metadata {
    /// Stamps the current time, or `SOURCE_DATE_EPOCH` when it is set.
    pub fn now(config_digest: String) -> Self {
        let ts = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse::<i64>().ok())
            .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
            .unwrap_or_else(chrono::Utc::now);
        Self {
            timestamp: ts.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            config_digest,
            tool_version: TOOL_VERSION.to_owned(),
        }
    }

    fn write_header<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# tool: {}", self.tool_version)?;
        writeln!(out, "# generated: {}", self.timestamp)?;
        writeln!(out, "# config_sha256: {}", self.config_digest)
    }
}

/// Sweep rows plus the metadata of the run that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub rows: Vec<SweepRow>,
    pub metadata: Metadata,
}

impl ReportBundle {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        self.metadata.write_header(&mut out)?;
        write_sweep_rows(&self.rows, out)
    }
}

/// Lower-case hex SHA-256 over the given parts, each length-prefixed.
pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_sweep_rows<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", SWEEP_COLUMNS.join(","))?;
    for r in rows {
        let reference = r.reference_f.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.model,
            r.n_workers,
            r.bandwidth_bps,
            r.compression_ratio,
            r.f_sim,
            r.t_overhead,
            reference
        )?;
    }
    Ok(())
}

/// Strips `#` metadata lines, leaving the deterministic body.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| [l, "\n"])
        .collect()
}

pub fn write_flush_log<W: Write>(result: &SimResult, mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "flush_time_s,start_time_s,end_time_s,bytes,transmission_s"
    )?;
    for f in &result.flush_log {
        writeln!(
            out,
            "{},{},{},{},{}",
            f.flush_time, f.start_time, f.end_time, f.bytes, f.transmission
        )?;
    }
    Ok(())
}

/// Fusion output for debugging: one row per batch, member layers joined by `;`.
pub fn write_batches<W: Write>(batches: &[FlushBatch], mut out: W) -> io::Result<()> {
    writeln!(out, "flush_time_s,bytes,layers")?;
    for b in batches {
        let layers: Vec<String> = b.member_layers.iter().map(u32::to_string).collect();
        writeln!(
            out,
            "{},{},{}",
            b.flush_time,
            b.total_bytes,
            layers.join(";")
        )?;
    }
    Ok(())
}

/// One-line machine-readable summary of a simulation.
pub const SUMMARY_COLUMNS: &str =
    "model,n_workers,bandwidth_bps,compression_ratio,t_batch_s,t_back_s,t_sync_s,t_overhead_s,f_sim,mean_utilization,flushes";

pub fn write_summary_csv<W: Write>(
    model: &str,
    config: &SimConfig,
    r: &SimResult,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "{SUMMARY_COLUMNS}")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{}",
        model,
        config.cluster.n_workers(),
        config.cluster.bandwidth_bps(),
        config.compression.ratio(),
        r.t_batch,
        r.t_back,
        r.t_sync,
        r.t_overhead,
        r.f_sim,
        r.mean_utilization,
        r.flush_log.len()
    )
}

pub fn write_text_report<W: Write>(
    model: &str,
    config: &SimConfig,
    r: &SimResult,
    mut out: W,
) -> io::Result<()> {
    let ms = |s: f64| s * 1e3;
    writeln!(out, "model            {model}")?;
    writeln!(out, "workers          {}", config.cluster.n_workers())?;
    writeln!(
        out,
        "bandwidth        {} Gbps",
        config.cluster.bandwidth_bps() / 1e9
    )?;
    writeln!(out, "compression      {}x", config.compression.ratio())?;
    writeln!(
        out,
        "fusion           timeout {} ms, buffer {} bytes",
        ms(config.fusion.timeout()),
        config.fusion.buffer_cap_bytes()
    )?;
    writeln!(out, "t_batch          {:.3} ms", ms(r.t_batch))?;
    writeln!(out, "t_back           {:.3} ms", ms(r.t_back))?;
    writeln!(out, "t_sync           {:.3} ms", ms(r.t_sync))?;
    writeln!(out, "t_overhead       {:.3} ms", ms(r.t_overhead))?;
    writeln!(out, "flushes          {}", r.flush_log.len())?;
    writeln!(out, "mean_utilization {:.3}", r.mean_utilization)?;
    writeln!(out, "f_sim = {:.3}", r.f_sim)
}
