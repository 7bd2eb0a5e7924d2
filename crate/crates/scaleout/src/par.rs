//! Parallel sweep execution.

use rayon::prelude::*;
use scaleout_core::sweep::row_order;
use scaleout_core::{ModelTrace, ReferencePoint, Result, SweepRow, SweepSpec};

/// Same rows, in the same order, as [`scaleout_core::run_sweep`]; points are
/// evaluated on the rayon pool.
pub fn run_sweep_parallel(
    spec: &SweepSpec,
    traces: &[ModelTrace],
    reference: &[ReferencePoint],
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let resolved = spec.resolve(traces)?;
    let mut rows = spec
        .points()
        .par_iter()
        .map(|p| spec.evaluate(resolved[p.model_index], p, reference))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| row_order(spec, a, b));
    Ok(rows)
}
