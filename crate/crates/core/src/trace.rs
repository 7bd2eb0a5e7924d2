//! Gradient-ready traces: the data model, validation and the bundled
//! synthetic profiles for ResNet50, ResNet101 and VGG16.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::table;

/// Tolerance for a declared `t_back` against the latest ready time.
const T_BACK_DECLARED_TOL: f64 = 1e-9;

/// One layer's gradient becoming available during the backward pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientEvent {
    /// 0 is the layer closest to the output, i.e. the first gradient produced.
    pub layer_index: u32,
    pub size_bytes: u64,
    /// Seconds since the start of the backward pass.
    pub ready_time: f64,
}

/// A validated per-iteration trace of one model on a single device.
///
/// Events are ordered by `ready_time`, ties broken by `layer_index`, and
/// `t_back` is exactly the latest ready time.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTrace {
    name: String,
    events: Vec<GradientEvent>,
    t_batch: f64,
    t_back: f64,
    total_bytes: u64,
}

impl ModelTrace {
    pub fn new(name: impl Into<String>, events: Vec<GradientEvent>, t_batch: f64) -> Result<Self> {
        Self::with_declared_t_back(name, events, t_batch, None)
    }

    /// Like [`ModelTrace::new`], additionally checking a `t_back` value
    /// recorded alongside the events.
    pub fn with_declared_t_back(
        name: impl Into<String>,
        mut events: Vec<GradientEvent>,
        t_batch: f64,
        declared_t_back: Option<f64>,
    ) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let mut seen = BTreeSet::new();
        let mut total: u64 = 0;
        for e in &events {
            if !(e.ready_time >= 0.0 && e.ready_time.is_finite()) {
                return Err(Error::InvalidReadyTime {
                    layer: e.layer_index,
                    value: e.ready_time,
                });
            }
            if !seen.insert(e.layer_index) {
                return Err(Error::DuplicateLayer {
                    layer: e.layer_index,
                });
            }
            total = total.checked_add(e.size_bytes).ok_or(Error::SizeOverflow)?;
        }
        if total == 0 {
            return Err(Error::ZeroTotalBytes);
        }
        events.sort_by(|a, b| {
            a.ready_time
                .total_cmp(&b.ready_time)
                .then(a.layer_index.cmp(&b.layer_index))
        });
        let t_back = events[events.len() - 1].ready_time;
        if t_back <= 0.0 {
            return Err(Error::NonPositiveTBack(t_back));
        }
        if let Some(declared) = declared_t_back {
            let diff = declared - t_back;
            if !(diff <= T_BACK_DECLARED_TOL && -diff <= T_BACK_DECLARED_TOL) {
                return Err(Error::TBackMismatch {
                    declared,
                    derived: t_back,
                });
            }
        }
        if !(t_batch >= t_back) || !t_batch.is_finite() {
            return Err(Error::TBatchBelowTBack { t_batch, t_back });
        }
        Ok(Self {
            name: name.into(),
            events,
            t_batch,
            t_back,
            total_bytes: total,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn events(&self) -> &[GradientEvent] {
        &self.events
    }

    /// Single-device time for one batch, forward and backward.
    pub fn t_batch(&self) -> f64 {
        self.t_batch
    }

    /// Backward-pass duration.
    pub fn t_back(&self) -> f64 {
        self.t_back
    }

    pub fn total_bytes(&self) -> u64 {
        self.total_bytes
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// The three bundled workloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelName {
    Resnet50,
    Resnet101,
    Vgg16,
}

impl ModelName {
    pub const ALL: [ModelName; 3] = [ModelName::Resnet50, ModelName::Resnet101, ModelName::Vgg16];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Resnet50 => "resnet50",
            ModelName::Resnet101 => "resnet101",
            ModelName::Vgg16 => "vgg16",
        }
    }

    /// Total gradient bytes (decimal MB: 97, 170 and 527).
    pub fn model_bytes(self) -> u64 {
        match self {
            ModelName::Resnet50 => 97_000_000,
            ModelName::Resnet101 => 170_000_000,
            ModelName::Vgg16 => 527_000_000,
        }
    }

    fn layer_table(self) -> &'static str {
        match self {
            ModelName::Resnet50 => table::RESNET50_LAYERS,
            ModelName::Resnet101 => table::RESNET101_LAYERS,
            ModelName::Vgg16 => table::VGG16_LAYERS,
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelName::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

/// Builds a synthetic trace from the bundled layer table of `model`.
///
/// Layers complete in backward order and each layer's share of `[0, t_back]`
/// is proportional to its forward multiply-accumulate count, so the last
/// layer (the network input side) is ready exactly at `t_back`.
pub fn synth_profile(model: ModelName, t_batch: f64, t_back: f64) -> Result<ModelTrace> {
    if !(t_back > 0.0) || !t_back.is_finite() {
        return Err(Error::NonPositiveTBack(t_back));
    }
    if !(t_batch >= t_back) || !t_batch.is_finite() {
        return Err(Error::TBatchBelowTBack { t_batch, t_back });
    }
    let rows = table::layer_rows(model.layer_table())?;
    let total_macs: u64 = rows.iter().map(|r| r.macs).sum();
    let last = rows.len() - 1;
    let mut cumulative: u64 = 0;
    let events = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            cumulative += r.macs;
            let ready_time = if i == last {
                t_back
            } else {
                t_back * (cumulative as f64 / total_macs as f64)
            };
            GradientEvent {
                layer_index: r.layer,
                size_bytes: r.bytes,
                ready_time,
            }
        })
        .collect();
    ModelTrace::new(model.as_str(), events, t_batch)
}

/// Single-GPU timing baseline shipped with a bundled model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub model: ModelName,
    pub batch_size: u32,
    pub t_batch: f64,
    pub t_back: f64,
}

pub fn bundled_profile(model: ModelName) -> Profile {
    // The profile table is compiled in and covered by tests.
    let rows = table::profile_rows(table::PROFILES).expect("bundled profile table");
    let row = rows
        .iter()
        .find(|r| r.model == model.as_str())
        .expect("every bundled model has a profile row");
    Profile {
        model,
        batch_size: row.batch_size,
        t_batch: row.t_batch,
        t_back: row.t_back,
    }
}

/// The synthetic trace of `model` at its bundled timing baseline.
pub fn bundled_trace(model: ModelName) -> ModelTrace {
    let p = bundled_profile(model);
    synth_profile(model, p.t_batch, p.t_back).expect("bundled profiles satisfy trace invariants")
}

/// A measured scaling factor used only for comparison overlays.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePoint {
    pub model: String,
    pub servers: u32,
    pub bandwidth_bps: f64,
    pub measured_scaling_factor: f64,
}

impl ReferencePoint {
    pub fn new(
        model: impl Into<String>,
        servers: u32,
        bandwidth_bps: f64,
        measured_scaling_factor: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&measured_scaling_factor) {
            return Err(Error::config(
                "scaling_factor",
                alloc::format!("{measured_scaling_factor} is outside [0, 1]"),
            ));
        }
        if !(bandwidth_bps > 0.0) {
            return Err(Error::config("bandwidth_bps", "must be positive"));
        }
        Ok(Self {
            model: model.into(),
            servers,
            bandwidth_bps,
            measured_scaling_factor,
        })
    }
}
