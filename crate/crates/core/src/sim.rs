//! One training iteration on a virtual clock.
//!
//! The backward process emits flushes (see [`crate::fusion`]) and the
//! all-reduce process serves them first-in first-out on a single network
//! resource: batch `i` starts at `max(flush_time_i, end_{i-1})` and runs for
//! its all-reduce cost. `t_sync` is the end of the last all-reduce.

use alloc::vec::Vec;

use crate::costmodel::{allreduce_cost, AddCostModel, ClusterConfig, CompressionModel};
use crate::error::{Error, Result};
use crate::fusion::{fuse, FusionConfig};
use crate::trace::ModelTrace;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub cluster: ClusterConfig,
    pub fusion: FusionConfig,
    pub compression: CompressionModel,
    pub add_model: AddCostModel,
}

impl SimConfig {
    /// Default fusion policy and add model, no compression.
    pub fn new(cluster: ClusterConfig) -> Self {
        Self {
            cluster,
            fusion: FusionConfig::default(),
            compression: CompressionModel::NONE,
            add_model: AddCostModel::default(),
        }
    }
}

/// One served all-reduce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlushRecord {
    pub flush_time: f64,
    pub start_time: f64,
    pub end_time: f64,
    pub bytes: u64,
    /// Transmission share of `end_time - start_time`.
    pub transmission: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub t_batch: f64,
    pub t_back: f64,
    pub t_sync: f64,
    /// `t_sync - t_back`
    pub t_overhead: f64,
    pub f_sim: f64,
    pub flush_log: Vec<FlushRecord>,
    /// Fraction of `[0, t_sync]` the network spends transmitting.
    pub mean_utilization: f64,
}

pub fn simulate(trace: &ModelTrace, config: &SimConfig) -> SimResult {
    let mut clock = 0.0_f64;
    let mut transmitting = 0.0;
    let flush_log: Vec<FlushRecord> = fuse(trace, &config.fusion)
        .into_iter()
        .map(|batch| {
            let cost = allreduce_cost(
                batch.total_bytes,
                &config.cluster,
                &config.add_model,
                &config.compression,
            );
            let start_time = clock.max(batch.flush_time);
            clock = start_time + cost.total();
            transmitting += cost.transmission;
            FlushRecord {
                flush_time: batch.flush_time,
                start_time,
                end_time: clock,
                bytes: batch.total_bytes,
                transmission: cost.transmission,
            }
        })
        .collect();

    // the final flush always happens at t_back, so t_sync >= t_back
    let t_sync = clock.max(trace.t_back());
    let t_overhead = t_sync - trace.t_back();
    SimResult {
        t_batch: trace.t_batch(),
        t_back: trace.t_back(),
        t_sync,
        t_overhead,
        f_sim: trace.t_batch() / (trace.t_batch() + t_overhead),
        flush_log,
        mean_utilization: transmitting / t_sync,
    }
}

/// `t_batch / (t_batch + t_overhead)`.
pub fn scaling_factor(t_batch: f64, t_overhead: f64) -> Result<f64> {
    if !(t_batch > 0.0) || !t_batch.is_finite() {
        return Err(Error::config(
            "t_batch",
            alloc::format!("must be positive, got {t_batch}"),
        ));
    }
    if !(t_overhead >= 0.0) {
        return Err(Error::config(
            "t_overhead",
            alloc::format!("must be non-negative, got {t_overhead}"),
        ));
    }
    Ok(t_batch / (t_batch + t_overhead))
}
