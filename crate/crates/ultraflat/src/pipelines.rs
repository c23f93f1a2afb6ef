//! Parallel drivers over the pure core routines.

use num_complex::Complex64;
use ultraflat_core::borel::{fit_asymptotics, from_log_moments, log_moment, ExtensionOperator};
use ultraflat_core::flat::{fit_flatness, FlatnessSamples};
use ultraflat_core::{
    AsymptoticReport, FlatFunction, FlatnessConfig, FlatnessGrid, FlatnessReport, Kernel, MomentKernel, Polar,
    QuadConfig, Result, WeightSequence,
};

use crate::parallel::par_map;

/// `ln |F|` on the grid, evaluated in parallel.
pub fn sample_flatness(f: &FlatFunction, grid: &FlatnessGrid) -> Result<FlatnessSamples> {
    let axis_pts = grid.axis_points();
    let sector_pts = grid.sector_points(f.sector());
    let axis = par_map(&axis_pts, |&x| f.log_positive_axis(x).map(|v| (x, v))).into_iter().collect::<Result<_>>()?;
    let sector = par_map(&sector_pts, |&z| f.log_eval(z).map(|v| (z, v.re))).into_iter().collect::<Result<_>>()?;
    Ok(FlatnessSamples { axis, sector })
}

pub fn verify_flatness(
    f: &FlatFunction,
    seq: &WeightSequence,
    grid: &FlatnessGrid,
    cfg: &FlatnessConfig,
) -> Result<(FlatnessReport, FlatnessSamples)> {
    let samples = sample_flatness(f, grid)?;
    let report = fit_flatness(&samples, seq, grid, cfg);
    Ok((report, samples))
}

/// Moments `m(0..=p_max)`, one order per task.
pub fn moments(kernel: &Kernel, seq: &WeightSequence, p_max: usize, quad: &QuadConfig) -> Result<MomentKernel> {
    let orders: Vec<usize> = (0..=p_max).collect();
    let parts = par_map(&orders, |&p| log_moment(kernel, p, quad)).into_iter().collect::<Result<Vec<_>>>()?;
    let (lm, err) = parts.into_iter().unzip();
    from_log_moments(kernel, seq, lm, err, quad)
}

/// `err_p(z)` for every grid point, one point per task.
pub fn remainder_table(op: &ExtensionOperator, grid: &[Polar], p_max: usize) -> Result<Vec<Vec<Complex64>>> {
    par_map(grid, |&z| op.remainders(z, p_max)).into_iter().collect()
}

pub fn verify_asymptotics(
    op: &ExtensionOperator,
    mk: &MomentKernel,
    grid: &[Polar],
    p_max: usize,
    flat_report: Option<&FlatnessReport>,
) -> Result<(AsymptoticReport, Vec<Vec<Complex64>>)> {
    let table = remainder_table(op, grid, p_max)?;
    let report = fit_asymptotics(op.series(), mk, grid, &table, p_max, flat_report);
    Ok((report, table))
}
