//! Bandwidth-only price of one ring all-reduce.
//!
//! A ring all-reduce of `S` bytes over `N` workers is a reduce-scatter
//! followed by an allgather. Each phase moves `S (N - 1) / N` bytes per
//! worker, and the reduce-scatter performs `N - 1` element-wise additions on
//! shards of `S / N` bytes. Sizes are decimal bytes, bandwidth is decimal
//! bits per second and durations are seconds.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Bytes read and written per byte of vector for `c = a + b`.
pub const ADD_BYTES_TOUCHED: f64 = 3.0;

/// Effective memory bandwidth behind the default add model, bytes/s.
///
/// 80% of the 900 GB/s nominal HBM2 bandwidth of a V100.
pub const DEFAULT_ADD_MEM_BW: f64 = 720e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterConfig {
    n_workers: u32,
    bandwidth_bps: f64,
}

impl ClusterConfig {
    /// `bandwidth_bps` may be `f64::INFINITY` for a communication-free bound.
    pub fn new(n_workers: u32, bandwidth_bps: f64) -> Result<Self> {
        if n_workers == 0 {
            return Err(Error::config("n_workers", "must be at least 1"));
        }
        if !(bandwidth_bps > 0.0) {
            return Err(Error::config(
                "bandwidth_bps",
                format!("must be positive, got {bandwidth_bps}"),
            ));
        }
        Ok(Self {
            n_workers,
            bandwidth_bps,
        })
    }

    pub fn n_workers(&self) -> u32 {
        self.n_workers
    }

    pub fn bandwidth_bps(&self) -> f64 {
        self.bandwidth_bps
    }
}

/// Gradient compression applied to the transmitted bytes only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionModel {
    ratio: f64,
}

impl CompressionModel {
    pub const NONE: CompressionModel = CompressionModel { ratio: 1.0 };

    pub fn new(ratio: f64) -> Result<Self> {
        if !(ratio >= 1.0) {
            return Err(Error::config(
                "compression_ratio",
                format!("must be >= 1, got {ratio}"),
            ));
        }
        Ok(Self { ratio })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }
}

impl Default for CompressionModel {
    fn default() -> Self {
        Self::NONE
    }
}

/// Piecewise-linear estimate of element-wise vector-add time against vector
/// size in bytes.
///
/// Samples start at `(0, 0)`, sizes strictly increase and durations never
/// decrease. Queries past the last sample extend the final segment.
#[derive(Debug, Clone, PartialEq)]
pub struct AddCostModel {
    samples: Vec<(u64, f64)>,
}

impl AddCostModel {
    pub fn new(samples: Vec<(u64, f64)>) -> Result<Self> {
        if samples.first() != Some(&(0, 0.0)) {
            return Err(Error::config("add_model", "first sample must be (0, 0)"));
        }
        if samples.len() < 2 {
            return Err(Error::config(
                "add_model",
                "at least two samples are required",
            ));
        }
        for (i, w) in samples.windows(2).enumerate() {
            let ((s0, d0), (s1, d1)) = (w[0], w[1]);
            if s1 <= s0 {
                return Err(Error::config(
                    "add_model",
                    format!(
                        "sample {}: sizes must strictly increase ({s0} then {s1})",
                        i + 1
                    ),
                ));
            }
            if !(d1 >= d0) || !d1.is_finite() {
                return Err(Error::config(
                    "add_model",
                    format!(
                        "sample {}: durations must be finite and non-decreasing",
                        i + 1
                    ),
                ));
            }
        }
        Ok(Self { samples })
    }

    /// Additions cost nothing.
    pub fn zero() -> Self {
        Self {
            samples: vec![(0, 0.0), (1, 0.0)],
        }
    }

    /// Memory-bound model: every byte of the vector touches
    /// [`ADD_BYTES_TOUCHED`] bytes at `mem_bw_bytes_per_s`.
    pub fn linear(mem_bw_bytes_per_s: f64) -> Result<Self> {
        if !(mem_bw_bytes_per_s > 0.0) || !mem_bw_bytes_per_s.is_finite() {
            return Err(Error::config("add_mem_bw", "must be positive and finite"));
        }
        const ANCHOR: u64 = 1 << 30;
        Self::new(vec![
            (0, 0.0),
            (
                ANCHOR,
                ADD_BYTES_TOUCHED * ANCHOR as f64 / mem_bw_bytes_per_s,
            ),
        ])
    }

    pub fn samples(&self) -> &[(u64, f64)] {
        &self.samples
    }

    /// Estimated duration of adding two vectors of `size_bytes` each.
    pub fn estimate(&self, size_bytes: u64) -> f64 {
        let s = &self.samples;
        // index of the first sample strictly above the query, clamped so a
        // segment always exists
        let hi = s
            .partition_point(|&(x, _)| x <= size_bytes)
            .clamp(1, s.len() - 1);
        let (x0, y0) = s[hi - 1];
        let (x1, y1) = s[hi];
        if size_bytes == x0 {
            return y0;
        }
        if size_bytes == x1 {
            return y1;
        }
        let t = (size_bytes - x0) as f64 / (x1 - x0) as f64;
        y0 + t * (y1 - y0)
    }
}

impl Default for AddCostModel {
    fn default() -> Self {
        Self::linear(DEFAULT_ADD_MEM_BW).expect("default bandwidth is valid")
    }
}

pub fn add_est(model: &AddCostModel, size_bytes: u64) -> f64 {
    model.estimate(size_bytes)
}

/// `(2 S (N - 1) / N) / bw`, divided by the compression ratio.
pub fn transmission_time(
    size_bytes: u64,
    cluster: &ClusterConfig,
    compression: &CompressionModel,
) -> f64 {
    if cluster.n_workers == 1 || size_bytes == 0 {
        return 0.0;
    }
    let n = cluster.n_workers as f64;
    let bits = 2.0 * size_bytes as f64 * 8.0 * (n - 1.0) / n;
    bits / cluster.bandwidth_bps / compression.ratio
}

/// The two components of an all-reduce.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AllReduceCost {
    pub transmission: f64,
    pub reduction: f64,
}

impl AllReduceCost {
    pub fn total(&self) -> f64 {
        self.transmission + self.reduction
    }
}

/// `S / N` rounded half up to whole bytes.
pub fn shard_bytes(size_bytes: u64, n_workers: u32) -> u64 {
    let n = n_workers as u128;
    ((2 * size_bytes as u128 + n) / (2 * n)) as u64
}

pub fn allreduce_cost(
    size_bytes: u64,
    cluster: &ClusterConfig,
    add_model: &AddCostModel,
    compression: &CompressionModel,
) -> AllReduceCost {
    if cluster.n_workers == 1 {
        return AllReduceCost::default();
    }
    let steps = (cluster.n_workers - 1) as f64;
    AllReduceCost {
        transmission: transmission_time(size_bytes, cluster, compression),
        reduction: steps * add_model.estimate(shard_bytes(size_bytes, cluster.n_workers)),
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn transmission_monotone(
            s in 0u64..10_000_000_000,
            ds in 0u64..1_000_000_000,
            n in 1u32..512,
            bw in 1e6f64..1e12,
            bw_scale in 1.0f64..100.0,
            r in 1.0f64..1000.0,
            r_scale in 1.0f64..100.0,
        ) {
            let none = CompressionModel::new(r).unwrap();
            let more = CompressionModel::new(r * r_scale).unwrap();
            let c = ClusterConfig::new(n, bw).unwrap();
            let base = transmission_time(s, &c, &none);
            prop_assert!(transmission_time(s, &ClusterConfig::new(n, bw * bw_scale).unwrap(), &none) <= base);
            prop_assert!(transmission_time(s, &c, &more) <= base);
            prop_assert!(transmission_time(s + ds, &c, &none) >= base);
            prop_assert!(transmission_time(s, &ClusterConfig::new(n + 1, bw).unwrap(), &none) >= base);
        }

        #[test]
        fn transmission_bounded_by_two_full_copies(s in 1u64..10_000_000_000, n in 1u32..100_000, bw in 1e6f64..1e12) {
            let c = ClusterConfig::new(n, bw).unwrap();
            let limit = 2.0 * s as f64 * 8.0 / bw;
            prop_assert!(transmission_time(s, &c, &CompressionModel::NONE) < limit);
        }

        #[test]
        fn compression_scales_transmission_only(
            s in 0u64..10_000_000_000,
            n in 1u32..512,
            bw in 1e6f64..1e12,
            r in 1.0f64..1000.0,
            mem_bw in 1e9f64..1e12,
        ) {
            let c = ClusterConfig::new(n, bw).unwrap();
            let add = AddCostModel::linear(mem_bw).unwrap();
            let compressed = allreduce_cost(s, &c, &add, &CompressionModel::new(r).unwrap());
            let free = allreduce_cost(s, &c, &add, &CompressionModel::new(f64::INFINITY).unwrap());
            let plain = transmission_time(s, &c, &CompressionModel::NONE);
            prop_assert_eq!(free.transmission, 0.0);
            prop_assert_eq!(compressed.reduction, free.reduction);
            let diff = compressed.total() - free.total();
            prop_assert!((diff - plain / r).abs() <= 1e-12 * (1.0 + plain));
        }

        #[test]
        fn add_est_piecewise_linear(
            mut sizes in proptest::collection::btree_set(1u64..1_000_000_000, 1..12),
            q in 0u64..2_000_000_000,
        ) {
            let sizes: Vec<u64> = core::iter::once(0).chain(core::mem::take(&mut sizes)).collect();
            let samples: Vec<(u64, f64)> = sizes.iter().map(|&x| (x, x as f64 * 2e-12 + if x > 0 { 1e-6 } else { 0.0 })).collect();
            let m = AddCostModel::new(samples.clone()).unwrap();
            for &(x, y) in &samples {
                prop_assert_eq!(m.estimate(x), y);
            }
            let v = m.estimate(q);
            prop_assert!(v >= 0.0);
            // continuity at each interior sample
            for &(x, y) in &samples[1..] {
                prop_assert!((m.estimate(x - 1) - y).abs() < 1e-9);
                prop_assert!((m.estimate(x + 1) - y).abs() < 1e-9);
            }
        }
    }
}
