//! Fusion-buffer batching of per-layer gradients into all-reduce flushes.
//!
//! The buffer is flushed when one of these happens:
//!
//! * **timeout**: `timeout` seconds after the first gradient entered the
//!   empty buffer. Everything buffered at that instant is flushed. A timeout
//!   that coincides with an arrival fires before the arrival is handled.
//! * **size**: an arriving gradient would push the buffer past
//!   `buffer_cap_bytes`. The buffer is flushed at the arrival time and the new
//!   gradient starts a fresh buffer. A gradient larger than the cap on its own
//!   is flushed immediately as a singleton.
//! * **backward complete**: once the last gradient has arrived, any residue
//!   is flushed at `t_back`.
//!
//! Flushes are decisions only; queueing behind an in-flight all-reduce is
//! handled by [`crate::sim`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::trace::ModelTrace;
use crate::TIME_EPS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionConfig {
    timeout: f64,
    buffer_cap_bytes: u64,
}

impl FusionConfig {
    pub const DEFAULT_TIMEOUT: f64 = 5e-3;
    pub const DEFAULT_BUFFER_CAP: u64 = 64 << 20;

    /// `timeout` may be `f64::INFINITY`.
    pub fn new(timeout: f64, buffer_cap_bytes: u64) -> Result<Self> {
        if !(timeout > 0.0) {
            return Err(Error::config(
                "timeout",
                alloc::format!("must be positive, got {timeout}"),
            ));
        }
        if buffer_cap_bytes == 0 {
            return Err(Error::config("buffer_cap_bytes", "must be positive"));
        }
        Ok(Self {
            timeout,
            buffer_cap_bytes,
        })
    }

    /// No timeout and no size cap: a single flush at `t_back`.
    pub fn unbounded() -> Self {
        Self {
            timeout: f64::INFINITY,
            buffer_cap_bytes: u64::MAX,
        }
    }

    pub fn timeout(&self) -> f64 {
        self.timeout
    }

    pub fn buffer_cap_bytes(&self) -> u64 {
        self.buffer_cap_bytes
    }
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            timeout: Self::DEFAULT_TIMEOUT,
            buffer_cap_bytes: Self::DEFAULT_BUFFER_CAP,
        }
    }
}

/// One all-reduce request handed to the network.
#[derive(Debug, Clone, PartialEq)]
pub struct FlushBatch {
    pub flush_time: f64,
    pub total_bytes: u64,
    pub member_layers: Vec<u32>,
}

#[derive(Default)]
struct Buffer {
    layers: Vec<u32>,
    bytes: u64,
    deadline: f64,
}

impl Buffer {
    fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    fn take(&mut self, flush_time: f64) -> FlushBatch {
        let batch = FlushBatch {
            flush_time,
            total_bytes: self.bytes,
            member_layers: core::mem::take(&mut self.layers),
        };
        self.bytes = 0;
        batch
    }
}

pub fn fuse(trace: &ModelTrace, config: &FusionConfig) -> Vec<FlushBatch> {
    let cap = config.buffer_cap_bytes;
    let mut out = Vec::new();
    let mut buf = Buffer::default();

    for e in trace.events() {
        let now = e.ready_time;
        if !buf.is_empty() && buf.deadline <= now + TIME_EPS {
            let deadline = buf.deadline;
            out.push(buf.take(deadline));
        }
        if !buf.is_empty() && buf.bytes.saturating_add(e.size_bytes) > cap {
            out.push(buf.take(now));
        }
        if e.size_bytes > cap {
            out.push(FlushBatch {
                flush_time: now,
                total_bytes: e.size_bytes,
                member_layers: alloc::vec![e.layer_index],
            });
            continue;
        }
        if buf.is_empty() {
            buf.deadline = now + config.timeout;
        }
        buf.layers.push(e.layer_index);
        buf.bytes += e.size_bytes;
    }
    if !buf.is_empty() {
        out.push(buf.take(trace.t_back()));
    }
    out
}
