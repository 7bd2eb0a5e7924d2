//! What-if sweeps over bandwidth, worker count and compression ratio.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::costmodel::{AddCostModel, ClusterConfig, CompressionModel};
use crate::error::{Error, Result};
use crate::fusion::FusionConfig;
use crate::sim::{simulate, SimConfig};
use crate::trace::{ModelTrace, ReferencePoint};

/// GPUs per server in the measured reference cluster.
pub const GPUS_PER_SERVER: u32 = 8;

/// Bandwidth of every measured reference point, bits/s.
pub const REFERENCE_BANDWIDTH_BPS: f64 = 100e9;

/// Ratios tried by [`min_ratio_for_target`] when none are given.
pub const DEFAULT_RATIO_GRID: [f64; 9] = [1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0, 50.0, 100.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Trace names, matched against [`ModelTrace::name`].
    pub models: Vec<String>,
    pub bandwidths_bps: Vec<f64>,
    pub worker_counts: Vec<u32>,
    pub compression_ratios: Vec<f64>,
    pub fusion: FusionConfig,
    pub add_model: AddCostModel,
}

/// One Cartesian point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub model_index: usize,
    pub n_workers: u32,
    pub bandwidth_bps: f64,
    pub compression_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model: String,
    pub n_workers: u32,
    pub bandwidth_bps: f64,
    pub compression_ratio: f64,
    pub f_sim: f64,
    pub t_overhead: f64,
    pub reference_f: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        fn non_empty<T>(v: &[T], field: &'static str) -> Result<()> {
            if v.is_empty() {
                return Err(Error::config(field, "list is empty"));
            }
            Ok(())
        }
        non_empty(&self.models, "models")?;
        non_empty(&self.bandwidths_bps, "bandwidths_bps")?;
        non_empty(&self.worker_counts, "worker_counts")?;
        non_empty(&self.compression_ratios, "compression_ratios")?;
        for &bw in &self.bandwidths_bps {
            if !(bw > 0.0) {
                return Err(Error::config(
                    "bandwidths_bps",
                    format!("{bw} is not positive"),
                ));
            }
        }
        if self.worker_counts.contains(&0) {
            return Err(Error::config("worker_counts", "0 workers"));
        }
        for &r in &self.compression_ratios {
            CompressionModel::new(r)
                .map_err(|_| Error::config("compression_ratios", format!("{r} is below 1")))?;
        }
        Ok(())
    }

    /// All points in output order: model (as listed), then workers,
    /// bandwidth and ratio ascending.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut workers = self.worker_counts.clone();
        workers.sort_unstable();
        let mut bws = self.bandwidths_bps.clone();
        bws.sort_by(f64::total_cmp);
        let mut ratios = self.compression_ratios.clone();
        ratios.sort_by(f64::total_cmp);

        let mut out =
            Vec::with_capacity(self.models.len() * workers.len() * bws.len() * ratios.len());
        for model_index in 0..self.models.len() {
            for &n_workers in &workers {
                for &bandwidth_bps in &bws {
                    for &compression_ratio in &ratios {
                        out.push(SweepPoint {
                            model_index,
                            n_workers,
                            bandwidth_bps,
                            compression_ratio,
                        });
                    }
                }
            }
        }
        out
    }

    /// Resolves each listed model to its trace.
    pub fn resolve<'a>(&self, traces: &'a [ModelTrace]) -> Result<Vec<&'a ModelTrace>> {
        self.models
            .iter()
            .map(|m| {
                traces
                    .iter()
                    .find(|t| t.name() == m)
                    .ok_or_else(|| Error::MissingTrace(m.clone()))
            })
            .collect()
    }

    /// Simulates a single point.
    pub fn evaluate(
        &self,
        trace: &ModelTrace,
        point: &SweepPoint,
        reference: &[ReferencePoint],
    ) -> Result<SweepRow> {
        let wrap = |e: Error| Error::SweepPoint {
            model: trace.name().into(),
            n_workers: point.n_workers,
            bandwidth_bps: point.bandwidth_bps,
            ratio: point.compression_ratio,
            source: Box::new(e),
        };
        let config = SimConfig {
            cluster: ClusterConfig::new(point.n_workers, point.bandwidth_bps).map_err(wrap)?,
            fusion: self.fusion,
            compression: CompressionModel::new(point.compression_ratio).map_err(wrap)?,
            add_model: self.add_model.clone(),
        };
        let result = simulate(trace, &config);
        Ok(SweepRow {
            model: trace.name().into(),
            n_workers: point.n_workers,
            bandwidth_bps: point.bandwidth_bps,
            compression_ratio: point.compression_ratio,
            f_sim: result.f_sim,
            t_overhead: result.t_overhead,
            reference_f: reference_for(
                reference,
                trace.name(),
                point.n_workers,
                point.bandwidth_bps,
            ),
        })
    }
}

/// Exact-match lookup of a measured point: same model, `n_workers` a whole
/// number of 8-GPU servers, 100 Gbps.
pub fn reference_for(
    reference: &[ReferencePoint],
    model: &str,
    n_workers: u32,
    bandwidth_bps: f64,
) -> Option<f64> {
    if !n_workers.is_multiple_of(GPUS_PER_SERVER) || bandwidth_bps != REFERENCE_BANDWIDTH_BPS {
        return None;
    }
    let servers = n_workers / GPUS_PER_SERVER;
    reference
        .iter()
        .find(|r| r.model == model && r.servers == servers && r.bandwidth_bps == bandwidth_bps)
        .map(|r| r.measured_scaling_factor)
}

/// Compares rows in sweep output order, given the position of each model.
pub fn row_order(spec: &SweepSpec, a: &SweepRow, b: &SweepRow) -> Ordering {
    let pos = |m: &str| spec.models.iter().position(|x| x == m);
    pos(&a.model)
        .cmp(&pos(&b.model))
        .then(a.n_workers.cmp(&b.n_workers))
        .then(a.bandwidth_bps.total_cmp(&b.bandwidth_bps))
        .then(a.compression_ratio.total_cmp(&b.compression_ratio))
}

/// Runs every point of `spec` sequentially.
pub fn run_sweep(
    spec: &SweepSpec,
    traces: &[ModelTrace],
    reference: &[ReferencePoint],
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let resolved = spec.resolve(traces)?;
    spec.points()
        .iter()
        .map(|p| spec.evaluate(resolved[p.model_index], p, reference))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioSearch {
    Found(f64),
    /// No ratio on the grid reaches the target.
    Unreachable,
}

/// Smallest ratio on `ratio_grid` whose simulated scaling factor reaches
/// `target_f`.
pub fn min_ratio_for_target(
    trace: &ModelTrace,
    cluster: &ClusterConfig,
    fusion: &FusionConfig,
    add_model: &AddCostModel,
    target_f: f64,
    ratio_grid: &[f64],
) -> Result<RatioSearch> {
    if ratio_grid.is_empty() {
        return Err(Error::config("ratio_grid", "list is empty"));
    }
    if !(target_f > 0.0 && target_f < 1.0) {
        return Err(Error::config(
            "target_f",
            format!("{target_f} is outside (0, 1)"),
        ));
    }
    if ratio_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::config("ratio_grid", "must be sorted ascending"));
    }
    for &ratio in ratio_grid {
        let config = SimConfig {
            cluster: *cluster,
            fusion: *fusion,
            compression: CompressionModel::new(ratio)?,
            add_model: add_model.clone(),
        };
        if simulate(trace, &config).f_sim >= target_f {
            return Ok(RatioSearch::Found(ratio));
        }
    }
    Ok(RatioSearch::Unreachable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{bundled_trace, ModelName};
    use crate::GBPS;
    use alloc::vec;
    use alloc::vec::Vec;

    fn spec(models: &[&str], bws: &[f64], workers: &[u32], ratios: &[f64]) -> SweepSpec {
        SweepSpec {
            models: models.iter().map(|s| String::from(*s)).collect(),
            bandwidths_bps: bws.to_vec(),
            worker_counts: workers.to_vec(),
            compression_ratios: ratios.to_vec(),
            fusion: FusionConfig::default(),
            add_model: AddCostModel::default(),
        }
    }

    fn traces() -> Vec<ModelTrace> {
        ModelName::ALL.iter().map(|&m| bundled_trace(m)).collect()
    }

    #[test]
    fn bandwidth_axis_gives_five_rows() {
        let bws: Vec<f64> = [1.0, 10.0, 25.0, 40.0, 100.0]
            .iter()
            .map(|g| g * GBPS)
            .collect();
        let rows = run_sweep(&spec(&["resnet50"], &bws, &[16], &[1.0]), &traces(), &[]).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows
            .windows(2)
            .all(|w| w[0].bandwidth_bps < w[1].bandwidth_bps));
        assert!(rows.windows(2).all(|w| w[0].f_sim <= w[1].f_sim));
    }

    #[test]
    fn single_point_matches_direct_simulation() {
        let t = traces();
        let rows = run_sweep(&spec(&["vgg16"], &[25e9], &[32], &[2.0]), &t, &[]).unwrap();
        let direct = simulate(
            &t[2],
            &SimConfig {
                compression: CompressionModel::new(2.0).unwrap(),
                ..SimConfig::new(ClusterConfig::new(32, 25e9).unwrap())
            },
        );
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].f_sim, direct.f_sim);
        assert_eq!(rows[0].t_overhead, direct.t_overhead);
        assert_eq!(rows[0].reference_f, None);
    }

    #[test]
    fn ratio_axis_is_monotone_on_vgg16() {
        let rows = run_sweep(
            &spec(&["vgg16"], &[10e9], &[16], &[10.0, 1.0, 5.0, 2.0]),
            &traces(),
            &[],
        )
        .unwrap();
        let ratios: Vec<f64> = rows.iter().map(|r| r.compression_ratio).collect();
        assert_eq!(ratios, vec![1.0, 2.0, 5.0, 10.0]);
        assert!(rows.windows(2).all(|w| w[0].f_sim <= w[1].f_sim));
    }

    #[test]
    fn rows_ordered_and_references_joined() {
        let reference = vec![
            ReferencePoint::new("resnet50", 2, 100e9, 0.7505).unwrap(),
            ReferencePoint::new("resnet50", 8, 100e9, 0.716).unwrap(),
        ];
        let s = spec(
            &["resnet101", "resnet50"],
            &[100e9, 10e9],
            &[64, 16, 12],
            &[1.0],
        );
        let rows = run_sweep(&s, &traces(), &reference).unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!(rows[0].model, "resnet101");
        assert_eq!(rows[6].model, "resnet50");
        assert!(rows
            .windows(2)
            .all(|w| row_order(&s, &w[0], &w[1]) == Ordering::Less));
        let joined: Vec<(u32, f64, Option<f64>)> = rows[6..]
            .iter()
            .map(|r| (r.n_workers, r.bandwidth_bps, r.reference_f))
            .collect();
        assert_eq!(
            joined,
            vec![
                (12, 10e9, None),
                (12, 100e9, None),
                (16, 10e9, None),
                (16, 100e9, Some(0.7505)),
                (64, 10e9, None),
                (64, 100e9, Some(0.716)),
            ]
        );
    }

    #[test]
    fn spec_validation_names_fields() {
        let t = traces();
        let check = |s: SweepSpec, field: &str| match run_sweep(&s, &t, &[]) {
            Err(Error::InvalidConfig { field: f, .. }) => assert_eq!(f, field),
            other => panic!("expected {field} error, got {other:?}"),
        };
        check(spec(&["vgg16"], &[], &[16], &[1.0]), "bandwidths_bps");
        check(spec(&[], &[1e9], &[16], &[1.0]), "models");
        check(spec(&["vgg16"], &[1e9], &[0], &[1.0]), "worker_counts");
        check(
            spec(&["vgg16"], &[1e9], &[16], &[0.5]),
            "compression_ratios",
        );
        check(spec(&["vgg16"], &[-1.0], &[16], &[1.0]), "bandwidths_bps");
        assert_eq!(
            run_sweep(&spec(&["alexnet"], &[1e9], &[16], &[1.0]), &t, &[]),
            Err(Error::MissingTrace("alexnet".into()))
        );
    }

    #[test]
    fn evaluate_identifies_offending_point() {
        let s = spec(&["vgg16"], &[1e9], &[16], &[1.0]);
        let t = bundled_trace(ModelName::Vgg16);
        let p = SweepPoint {
            model_index: 0,
            n_workers: 0,
            bandwidth_bps: 1e9,
            compression_ratio: 1.0,
        };
        let err = s.evaluate(&t, &p, &[]).unwrap_err();
        assert!(matches!(err, Error::SweepPoint { n_workers: 0, .. }));
        assert!(format!("{err}").contains("n_workers 0"));
    }

    #[test]
    fn infinite_bandwidth_needs_no_compression() {
        let t = bundled_trace(ModelName::Vgg16);
        let r = min_ratio_for_target(
            &t,
            &ClusterConfig::new(64, f64::INFINITY).unwrap(),
            &FusionConfig::default(),
            &AddCostModel::zero(),
            0.999_999,
            &DEFAULT_RATIO_GRID,
        )
        .unwrap();
        assert_eq!(r, RatioSearch::Found(1.0));
    }

    #[test]
    fn unreachable_and_invalid_searches() {
        let t = bundled_trace(ModelName::Vgg16);
        let c = ClusterConfig::new(64, 1e9).unwrap();
        let f = FusionConfig::default();
        let a = AddCostModel::default();
        assert_eq!(
            min_ratio_for_target(&t, &c, &f, &a, 0.99, &[1.0, 2.0]),
            Ok(RatioSearch::Unreachable)
        );
        assert!(min_ratio_for_target(&t, &c, &f, &a, 0.99, &[]).is_err());
        assert!(min_ratio_for_target(&t, &c, &f, &a, 1.0, &[1.0]).is_err());
        assert!(min_ratio_for_target(&t, &c, &f, &a, 0.5, &[2.0, 1.0]).is_err());
        assert!(min_ratio_for_target(&t, &c, &f, &a, 0.5, &[0.5, 1.0]).is_err());
    }
}
