//! JSON sweep configuration.
//!
//! ```json
//! {
//!   "models": ["resnet50", "vgg16"],
//!   "traces": {"custom": "runs/custom.jsonl"},
//!   "bandwidths_bps": [1e9, 10e9, 100e9],
//!   "worker_counts": [16],
//!   "compression_ratios": [1],
//!   "fusion": {"timeout_s": 0.005, "buffer_cap_bytes": 67108864},
//!   "add_model": {"mem_bw_bytes_per_s": 7.2e11}
//! }
//! ```
//!
//! Models without an entry in `traces` must be bundled. Relative trace paths
//! resolve against the directory of the configuration file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use scaleout_core::{AddCostModel, FusionConfig, SweepSpec};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionSection {
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    #[serde(default = "default_cap")]
    pub buffer_cap_bytes: u64,
}

fn default_timeout() -> f64 {
    FusionConfig::DEFAULT_TIMEOUT
}

fn default_cap() -> u64 {
    FusionConfig::DEFAULT_BUFFER_CAP
}

impl Default for FusionSection {
    fn default() -> Self {
        Self {
            timeout_s: default_timeout(),
            buffer_cap_bytes: default_cap(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum AddSection {
    /// Linear model at this effective memory bandwidth.
    MemBwBytesPerS(f64),
    /// `[size_bytes, seconds]` pairs, first pair `[0, 0]`.
    Samples(Vec<(u64, f64)>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub models: Vec<String>,
    #[serde(default)]
    pub traces: BTreeMap<String, PathBuf>,
    pub bandwidths_bps: Vec<f64>,
    pub worker_counts: Vec<u32>,
    #[serde(default = "default_ratios")]
    pub compression_ratios: Vec<f64>,
    #[serde(default)]
    pub fusion: FusionSection,
    pub add_model: Option<AddSection>,
}

fn default_ratios() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, thiserror::Error)]
pub enum SpecFileError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] scaleout_core::Error),
}

impl SweepFile {
    pub fn parse(text: &str) -> Result<Self, SpecFileError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds the validated sweep and the trace paths it needs, relative to
    /// `base`.
    pub fn into_spec(
        self,
        base: &Path,
    ) -> Result<(SweepSpec, BTreeMap<String, PathBuf>), SpecFileError> {
        let fusion = FusionConfig::new(self.fusion.timeout_s, self.fusion.buffer_cap_bytes)?;
        let add_model = match self.add_model {
            None => AddCostModel::default(),
            Some(AddSection::MemBwBytesPerS(bw)) => AddCostModel::linear(bw)?,
            Some(AddSection::Samples(s)) => AddCostModel::new(s)?,
        };
        let spec = SweepSpec {
            models: self.models,
            bandwidths_bps: self.bandwidths_bps,
            worker_counts: self.worker_counts,
            compression_ratios: self.compression_ratios,
            fusion,
            add_model,
        };
        spec.validate()?;
        let traces = self
            .traces
            .into_iter()
            .map(|(k, p)| (k, base.join(p)))
            .collect();
        Ok((spec, traces))
    }
}
