//! Trace-driven what-if model for synchronous data-parallel training.
//!
//! Given the time at which each layer's gradient becomes ready during the
//! backward pass, the crate replays a fusion-buffer batching policy, prices
//! every flushed batch with a ring all-reduce cost model (reduce-scatter then
//! allgather, plus the element-wise additions of the reduction phase) and
//! serves the batches on a single network resource. The result is the time
//! the last all-reduce completes and the scaling factor
//! `t_batch / (t_batch + t_sync - t_back)` a fully utilized network would
//! achieve.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports, plots
//! and the CLI live in the `scaleout` crate.

#![cfg_attr(not(test), no_std)]
// NaN must fail every range check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod costmodel;
pub mod error;
pub mod fusion;
pub mod sim;
pub mod sweep;
pub mod trace;

mod table;

pub use costmodel::{
    add_est, allreduce_cost, transmission_time, AddCostModel, AllReduceCost, ClusterConfig,
    CompressionModel,
};
pub use error::{Error, Result};
pub use fusion::{fuse, FlushBatch, FusionConfig};
pub use sim::{scaling_factor, simulate, FlushRecord, SimConfig, SimResult};
pub use sweep::{
    min_ratio_for_target, run_sweep, RatioSearch, SweepPoint, SweepRow, SweepSpec,
    DEFAULT_RATIO_GRID,
};
pub use trace::{
    bundled_profile, bundled_trace, synth_profile, GradientEvent, ModelName, ModelTrace, Profile,
    ReferencePoint,
};

/// Absolute tolerance, in seconds, used when ordering simultaneous events.
pub const TIME_EPS: f64 = 1e-12;

/// Decimal bytes per megabyte.
pub const MB: f64 = 1e6;

/// Decimal bits per second in one Gbps.
pub const GBPS: f64 = 1e9;
