//! One function per subcommand. Each reads its resolved input, writes its
//! CSV and JSON outputs and reports verification failures as errors after
//! the outputs are on disk.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use ultraflat_core::assoc::{kappa, kappa_nu_exact, kappa_quad, mg_duality_check, nu_doubling_constant};
use ultraflat_core::borel::{moment_quad, polar_grid, ExtendConfig};
use ultraflat_core::harmonic::harmonic_quad;
use ultraflat_core::{
    check_property, convolve, gamma_estimate, kernel_from_flat, langenbruch_fit, AssociatedFunctions, Error,
    ExtensionOperator, FlatnessConfig, FlatnessGrid, FormalSeries, HarmonicEvaluator, Omega, Property, QuadConfig,
    Verdict, WeightSequence,
};

use crate::acceptance::{self, CriterionResult};
use crate::error::{CliError, CliResult};
use crate::inputs::{
    ConvolveSpec, ExtendSpec, FlatCommandSpec, FlatSpec, Generator, GridSpec, MomentsSpec, SequenceCommandSpec,
    SeriesSpec, DEFAULT_PREFIX,
};
use crate::io::Output;
use crate::parallel::par_map;
use crate::pipelines;

/// Overrides shared by all subcommands.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_abs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_rel: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
}

impl Overrides {
    pub fn validate(&self) -> CliResult<()> {
        for (name, v) in [("--tol-abs", self.tol_abs), ("--tol-rel", self.tol_rel)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.prefix_n.is_some_and(|n| n < 8) {
            return Err(CliError::Usage("--prefix-n must be at least 8".into()));
        }
        if self.grid_points.is_some_and(|n| n < 2) {
            return Err(CliError::Usage("--grid-points must be at least 2".into()));
        }
        Ok(())
    }

    pub fn prefix(&self) -> usize {
        self.prefix_n.unwrap_or(DEFAULT_PREFIX)
    }

    pub fn quad(&self, base: QuadConfig) -> QuadConfig {
        QuadConfig {
            abs_tol: self.tol_abs.unwrap_or(base.abs_tol),
            rel_tol: self.tol_rel.unwrap_or(base.rel_tol),
            max_subdivisions: base.max_subdivisions,
        }
    }
}

/// NaN marks points outside the evaluable domain.
fn or_nan(v: ultraflat_core::Result<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

#[derive(Serialize)]
struct CertificateRecord {
    property: Property,
    verdict: Verdict,
    constant: f64,
    witness: usize,
    prefix: usize,
}

fn certificates(seq: &WeightSequence) -> Vec<CertificateRecord> {
    [Property::Lc, Property::Dc, Property::Mg, Property::Nq, Property::Snq]
        .into_iter()
        .map(|p| {
            let c = check_property(seq, p);
            CertificateRecord {
                property: c.property,
                verdict: c.verdict,
                constant: c.fitted_constant,
                witness: c.witness_index,
                prefix: c.prefix,
            }
        })
        .collect()
}

pub fn sequence(spec: &SequenceCommandSpec, ov: &Overrides, out: &Output) -> CliResult<()> {
    let seq = spec.sequence.build(ov.prefix())?;
    let rows = (0..seq.len()).map(|p| vec![p as f64, seq.log_quotient(p), seq.log_term(p)]);
    out.write_csv("sequence.csv", &["p", "ln_m_p", "ln_M_p"], rows)?;
    out.write_json(
        "sequence.json",
        &json!({
            "label": seq.label(),
            "prefix": seq.len(),
            "log_convex": seq.is_log_convex(),
            "certificates": certificates(&seq),
            "gamma_estimate": gamma_estimate(&seq),
        }),
    )?;
    Ok(())
}

const ASSOC_GRID: GridSpec = GridSpec { lo: 0.1, hi: 1e4, points: 50 };

pub fn assoc(spec: &SequenceCommandSpec, ov: &Overrides, out: &Output) -> CliResult<()> {
    let seq = spec.sequence.build(ov.prefix())?;
    let grid = spec.grid.unwrap_or(ASSOC_GRID).points(ov.grid_points)?;
    let af = AssociatedFunctions::new(&seq);
    let quad = ov.quad(kappa_quad());
    let rows = par_map(&grid, |&t| {
        vec![
            t,
            or_nan(af.omega(t)),
            or_nan(af.h(t)),
            or_nan(af.nu(t)),
            or_nan(kappa_nu_exact(&seq, t)),
            or_nan(kappa(&Omega(&seq), t, &quad).map(|k| k.value)),
        ]
    });
    let two_route = grid
        .iter()
        .filter_map(|&t| Some((af.omega_sup(t).ok()? - af.omega_integral(t).ok()?).abs()))
        .fold(0.0, f64::max);
    let duality = grid
        .iter()
        .filter_map(|&t| Some((af.ln_h(t).ok()? + af.omega(1.0 / t).ok()?).exp_m1().abs()))
        .fold(0.0, f64::max);
    out.write_csv("assoc.csv", &["t", "omega", "h", "nu", "kappa_nu", "kappa_omega"], rows)?;
    out.write_json(
        "assoc.json",
        &json!({
            "label": seq.label(),
            "omega_two_route_max_abs": two_route,
            "duality_max_rel": duality,
            "nu_doubling": nu_doubling_constant(&seq, &grid).ok(),
            "mg_duality": mg_duality_check(&seq, &grid).ok(),
        }),
    )?;
    Ok(())
}

const HARMONIC_GRID: GridSpec = GridSpec { lo: 0.1, hi: 1e3, points: 20 };

pub fn harmonic(spec: &SequenceCommandSpec, ov: &Overrides, out: &Output) -> CliResult<()> {
    let seq = spec.sequence.build(ov.prefix())?;
    let grid = spec.grid.unwrap_or(HARMONIC_GRID).points(ov.grid_points)?;
    let quad = ov.quad(harmonic_quad());
    let fit = langenbruch_fit(&seq, &grid, &quad)?;
    let ev = HarmonicEvaluator::new(Omega(&seq), quad);
    let af = AssociatedFunctions::new(&seq);
    let kq = ov.quad(kappa_quad());
    let rows = par_map(&grid, |&y| -> CliResult<Vec<f64>> {
        Ok(vec![
            y,
            ev.poisson(0.0, y)?.value,
            kappa(&Omega(&seq), y, &kq)?.value,
            af.omega(y)?,
            ev.conjugate_unfolded(0.0, y)?.value,
        ])
    })
    .into_iter()
    .collect::<CliResult<Vec<_>>>()?;
    out.write_csv("harmonic.csv", &["y", "P", "kappa", "omega", "Q"], rows)?;
    out.write_json("harmonic.json", &fit)?;
    if !fit.pass {
        return Err(CliError::Verification(format!("{}: {}", fit.name, fit.note)));
    }
    Ok(())
}

pub fn flat(spec: &FlatCommandSpec, ov: &Overrides, out: &Output) -> CliResult<()> {
    let (func, seq) = spec.flat.build(ov.prefix(), &ov.quad(harmonic_quad()))?;
    let std_grid = FlatnessGrid::standard();
    let x = match spec.x_grid {
        Some(g) => g.points(ov.grid_points)?,
        None => match ov.grid_points {
            Some(n) => GridSpec { lo: 1e-6, hi: 10.0, points: n }.points(None)?,
            None => std_grid.x,
        },
    };
    let grid = FlatnessGrid::new(x, spec.angles.unwrap_or(21), spec.coverage.unwrap_or(0.95));
    let (report, samples) = pipelines::verify_flatness(&func, &seq, &grid, &FlatnessConfig::default())?;
    let af = AssociatedFunctions::new(&seq);
    let rows = samples.sector.iter().map(|(z, lg)| {
        let bound = af.ln_h(report.k4 * z.r).map(|l| report.k3 * l.exp()).unwrap_or(f64::NAN);
        vec![z.r, z.theta, lg.exp(), bound]
    });
    out.write_csv("flat.csv", &["r", "theta", "abs_G", "h_bound"], rows)?;
    out.write_json(
        "flat.json",
        &json!({ "sequence": seq.label(), "sector_gamma": func.sector().opening_gamma(), "report": report }),
    )?;
    if !report.pass {
        return Err(CliError::Verification(format!(
            "flatness constants not certified{}",
            report.inconclusive.as_deref().map(|s| format!(" ({s})")).unwrap_or_default()
        )));
    }
    Ok(())
}

pub fn moments(spec: &MomentsSpec, ov: &Overrides, out: &Output) -> CliResult<()> {
    let (func, _) = spec.kernel.build(ov.prefix(), &ov.quad(harmonic_quad()))?;
    let seq = spec.sequence.build(ov.prefix())?;
    let kernel = kernel_from_flat(&func);
    let mk = pipelines::moments(&kernel, &seq, spec.p_max, &ov.quad(moment_quad()))?;
    let roots = mk.log_root_ratios(&seq);
    let rows = (0..=spec.p_max).map(|p| {
        let root = if p == 0 { f64::NAN } else { roots[p - 1] };
        vec![p as f64, mk.log_moment(p), mk.relative_errors()[p], root]
    });
    out.write_csv("moments.csv", &["p", "ln_m", "rel_err", "ln_root_ratio"], rows)?;
    out.write_json(
        "moments.json",
        &json!({
            "sequence": seq.label(),
            "max_order": mk.max_order(),
            "m0": mk.moment(0),
            "B1": mk.b1(),
            "B2": mk.b2(),
            "max_rel_err": mk.relative_errors().iter().copied().fold(0.0, f64::max),
        }),
    )?;
    Ok(())
}

/// Opening of the sector a pipeline kernel is built on.
fn pipeline_opening(spec: &FlatSpec) -> Option<f64> {
    match spec {
        FlatSpec::Harmonic { .. } => Some(1.0),
        FlatSpec::Ramified { gamma, .. } => Some(*gamma),
        _ => None,
    }
}

fn pipeline_sequence(spec: &FlatSpec) -> Option<&crate::inputs::SequenceSpec> {
    match spec {
        FlatSpec::Harmonic { sequence, .. } | FlatSpec::Ramified { sequence, .. } => Some(sequence),
        _ => None,
    }
}

fn refuse_boundary(spec: &FlatSpec, n: usize) -> CliResult<()> {
    let (Some(gamma), Some(sseq)) = (pipeline_opening(spec), pipeline_sequence(spec)) else {
        return Ok(());
    };
    let hint = match spec {
        FlatSpec::Harmonic { gamma_hint, .. } | FlatSpec::Ramified { gamma_hint, .. } => *gamma_hint,
        _ => None,
    };
    let est = match hint {
        Some(h) => h,
        None => {
            let g = gamma_estimate(&sseq.build(n)?);
            if g.is_capped() {
                return Ok(());
            }
            g.value()
        }
    };
    if gamma >= est {
        return Err(CliError::Core(Error::Precondition(format!(
            "sector opening {gamma} is not below the growth index estimate {est}; \
             the boundary case and beyond are not covered, refusing to extend"
        ))));
    }
    Ok(())
}

fn build_series(spec: &SeriesSpec, seq: &WeightSequence, a: f64) -> CliResult<FormalSeries> {
    Ok(match spec {
        SeriesSpec::Generator { generator: Generator::AlternatingMp, p_max } => {
            FormalSeries::alternating_mp(seq, a, *p_max)?
        }
        SeriesSpec::Generator { generator: Generator::Zero, p_max } => FormalSeries::zero(seq, a, *p_max)?,
        SeriesSpec::Coeffs { coeffs } => {
            let c: Vec<Complex64> = coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            FormalSeries::from_coeffs(&c, a, seq)?
        }
    })
}

pub fn extend(spec: &ExtendSpec, ov: &Overrides, out: &Output) -> CliResult<()> {
    let n = ov.prefix();
    refuse_boundary(&spec.kernel, n)?;
    let seq = spec.sequence.build(n)?;
    let (func, _) = spec.kernel.build(n, &ov.quad(harmonic_quad()))?;
    let series = build_series(&spec.series, &seq, spec.a)?;
    if spec.p_max >= series.len() {
        return Err(CliError::Config(format!("p_max {} needs at least {} coefficients", spec.p_max, spec.p_max + 1)));
    }
    if !(spec.angle_fraction > 0.0 && spec.angle_fraction < 1.0) || spec.angles == 0 {
        return Err(CliError::Config("angle_fraction must lie in (0, 1) and angles must be positive".into()));
    }
    let kernel = kernel_from_flat(&func);
    let orders = spec.moments.unwrap_or(series.len() - 1);
    let mk = pipelines::moments(&kernel, &seq, orders, &moment_quad())?;
    let base = ExtendConfig::default();
    let cfg = ExtendConfig { quad: ov.quad(base.quad), ..base };
    let op = ExtensionOperator::new(&series, &mk, &cfg)?;
    let radii = spec.radii.points(ov.grid_points)?;
    let grid = polar_grid(&radii, spec.angles, spec.angle_fraction * func.sector().half_opening());
    let flat_report =
        pipelines::verify_flatness(&func, &seq, &FlatnessGrid::standard(), &FlatnessConfig::default()).ok();
    let flat_report = flat_report.map(|r| r.0).filter(|r| r.pass);
    let (report, table) = pipelines::verify_asymptotics(&op, &mk, &grid, spec.p_max, flat_report.as_ref())?;
    let values = par_map(&grid, |&z| op.eval(z).map(|v| v.value)).into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut header: Vec<String> = ["r", "theta", "re_f", "im_f"].iter().map(|s| s.to_string()).collect();
    header.extend((0..=spec.p_max).map(|p| format!("err_{p}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = grid.iter().zip(&values).zip(&table).map(|((z, v), errs)| {
        let mut row = vec![z.r, z.theta, v.re, v.im];
        row.extend(errs.iter().map(|e| e.norm()));
        row
    });
    out.write_csv("extend.csv", &header, rows)?;
    out.write_json(
        "extend.json",
        &json!({
            "sequence": seq.label(),
            "A": spec.a,
            "R0": op.r0(),
            "truncation_order": op.order(),
            "B1": mk.b1(),
            "B2": mk.b2(),
            "report": report,
        }),
    )?;
    if !report.pass {
        return Err(CliError::Verification("asymptotic bound not established on the grid".into()));
    }
    Ok(())
}

pub fn convolve_cmd(spec: &ConvolveSpec, ov: &Overrides, out: &Output) -> CliResult<()> {
    let a = spec.left.build(ov.prefix())?;
    let b = spec.right.build(ov.prefix())?;
    let l = convolve(&a, &b)?;
    let rows = (0..l.len()).map(|p| vec![p as f64, l.log_term(p), l.log_quotient(p)]);
    out.write_csv("convolve.csv", &["p", "ln_L_p", "ln_l_p"], rows)?;
    out.write_json(
        "convolve.json",
        &json!({
            "label": l.label(),
            "prefix": l.len(),
            "gamma_estimates": {
                "left": gamma_estimate(&a),
                "right": gamma_estimate(&b),
                "result": gamma_estimate(&l),
            },
            "certificates": certificates(&l),
        }),
    )?;
    Ok(())
}

/// Input of `verify-all`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    #[serde(default = "all_criteria")]
    pub criteria: Vec<u32>,
}

fn all_criteria() -> Vec<u32> {
    acceptance::ALL.to_vec()
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    id: u32,
    pass: bool,
    measured: f64,
    expected: &'a str,
    tolerance: f64,
    name: &'a str,
    seconds: f64,
    detail: &'a str,
}

pub fn verify_all(spec: &VerifySpec, out: &Output) -> CliResult<Vec<CriterionResult>> {
    if let Some(bad) = spec.criteria.iter().find(|id| !acceptance::ALL.contains(id)) {
        return Err(CliError::Config(format!("unknown criterion {bad}")));
    }
    let mut results = Vec::new();
    for &id in &spec.criteria {
        let r = acceptance::run_one(id).expect("known criterion");
        println!("{}", r.line());
        results.push(r);
    }
    let rows: Vec<SummaryRow> = results
        .iter()
        .map(|r| SummaryRow {
            id: r.id,
            pass: r.pass,
            measured: r.measured,
            expected: &r.expected,
            tolerance: r.tolerance,
            name: &r.name,
            seconds: r.seconds,
            detail: &r.detail,
        })
        .collect();
    let pass = results.iter().all(|r| r.pass);
    out.write_json("verify_all.json", &json!({ "pass": pass, "criteria": rows }))?;
    out.write_csv(
        "verify_all.csv",
        &["id", "pass", "measured", "tolerance"],
        results.iter().map(|r| vec![r.id as f64, r.pass as u8 as f64, r.measured, r.tolerance]),
    )?;
    let failed: Vec<String> = results.iter().filter(|r| !r.pass).map(|r| r.id.to_string()).collect();
    if !failed.is_empty() {
        return Err(CliError::Verification(format!("criteria failed: {}", failed.join(", "))));
    }
    Ok(results)
}
