//! The acceptance suite: fourteen numbered criteria, each reduced to a
//! measured number, the bound it is held to and a verdict.

use std::f64::consts::{E, PI};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use ultraflat_core::assoc::{kappa, kappa_nu_exact, kappa_quad, q_gevrey_b, q_gevrey_omega_bounds};
use ultraflat_core::borel::{moment_quad, polar_grid, ExtendConfig};
use ultraflat_core::harmonic::harmonic_quad;
use ultraflat_core::{
    check_property, convolve, flat_halfplane, flat_q_gevrey_s2, flat_q_gevrey_sgamma, gamma_estimate, gevrey,
    kernel_from_flat, langenbruch_fit, log_grid, m_alpha_beta, power, q_gevrey, reference_exp, AssociatedFunctions,
    Error, ExtensionOperator, FlatFunction, FlatnessConfig, FlatnessGrid, FlatnessReport, FormalSeries,
    HarmonicEvaluator, Omega, Polar, Property, Sector, Verdict, WeightSequence,
};

use crate::pipelines;

/// Criteria whose failure is understood and recorded; the test target
/// reports them without failing the build.
pub const EXPECTED_RED: &[u32] = &[11];

pub const ALL: [u32; 14] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub expected: String,
    pub tolerance: f64,
    pub seconds: f64,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<28} measured {:.6e} vs {} (tol {:.1e}) in {:.2}s; {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.expected,
            self.tolerance,
            self.seconds,
            self.detail
        )
    }
}

struct Outcome {
    pass: bool,
    measured: f64,
    expected: String,
    tolerance: f64,
    detail: String,
}

type Check = fn() -> Result<Outcome, Error>;

fn table() -> [(u32, &'static str, Check); 14] {
    [
        (1, "duality", c1_duality),
        (2, "omega two routes", c2_omega_routes),
        (3, "term recovery", c3_recovery),
        (4, "poisson sandwich", c4_poisson),
        (5, "komatsu relation", c5_komatsu),
        (6, "conjugate normalization", c6_conjugate),
        (7, "langenbruch", c7_langenbruch),
        (8, "q-gevrey omega sandwich", c8_q_sandwich),
        (9, "flatness", c9_flatness),
        (10, "moments", c10_moments),
        (11, "extension round trip", c11_extension),
        (12, "convolution identities", c12_convolution),
        (13, "property certificates", c13_certificates),
        (14, "growth index", c14_gamma),
    ]
}

pub fn run_one(id: u32) -> Option<CriterionResult> {
    let (_, name, check) = table().into_iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let out = check();
    let seconds = start.elapsed().as_secs_f64();
    Some(match out {
        Ok(o) => CriterionResult {
            id,
            name: name.into(),
            pass: o.pass,
            measured: o.measured,
            expected: o.expected,
            tolerance: o.tolerance,
            seconds,
            detail: o.detail,
        },
        Err(e) => CriterionResult {
            id,
            name: name.into(),
            pass: false,
            measured: f64::NAN,
            expected: "no error".into(),
            tolerance: 0.0,
            seconds,
            detail: format!("error: {e}"),
        },
    })
}

pub fn run_selected(ids: &[u32]) -> Vec<CriterionResult> {
    ids.iter().filter_map(|&id| run_one(id)).collect()
}

const N: usize = 256;

fn duality_families() -> Result<Vec<WeightSequence>, Error> {
    Ok(vec![gevrey(1.0, N)?, gevrey(2.0, N)?, q_gevrey(2.0, 2.0, N)?, m_alpha_beta(1.0, 1.0, N)?])
}

/// `[2/m_{N−1}, 10/m_0]`, log-spaced, 60 points.
fn dual_grid(seq: &WeightSequence) -> Vec<f64> {
    let lq = seq.log_quotients();
    log_grid(2.0 * (-lq[lq.len() - 1]).exp(), 10.0 * (-lq[0]).exp(), 60)
}

fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v) })
}

fn c1_duality() -> Result<Outcome, Error> {
    let tol = 1e-12;
    let mut errs = Vec::new();
    for seq in duality_families()? {
        let af = AssociatedFunctions::new(&seq);
        for t in dual_grid(&seq) {
            let v = af.ln_h_inf(t)? + af.omega(1.0 / t)?;
            errs.push(v.exp_m1().abs());
        }
    }
    let m = worst(errs);
    Ok(Outcome {
        pass: m <= tol,
        measured: m,
        expected: "|h(t) exp(w(1/t)) - 1| <= tol".into(),
        tolerance: tol,
        detail: "4 families, 60 points each".into(),
    })
}

fn c2_omega_routes() -> Result<Outcome, Error> {
    let tol = 1e-10;
    let mut errs = Vec::new();
    for seq in duality_families()? {
        let af = AssociatedFunctions::new(&seq);
        for t in dual_grid(&seq) {
            let s = 1.0 / t;
            errs.push((af.omega_sup(s)? - af.omega_integral(s)?).abs());
        }
    }
    let m = worst(errs);
    Ok(Outcome {
        pass: m <= tol,
        measured: m,
        expected: "|w_sup - w_integral| <= tol".into(),
        tolerance: tol,
        detail: "4 families, 60 points each".into(),
    })
}

fn c3_recovery() -> Result<Outcome, Error> {
    let tol = 1e-9;
    let mut errs = Vec::new();
    for seq in duality_families()? {
        let af = AssociatedFunctions::new(&seq);
        for p in 0..=40 {
            let target = seq.log_term(p);
            let got = af.recover_log_term(p)?.by_search;
            errs.push((got - target).abs() / target.abs().max(1.0));
        }
    }
    let m = worst(errs);
    Ok(Outcome {
        pass: m <= tol,
        measured: m,
        expected: "relative error of recovered ln M_p <= tol".into(),
        tolerance: tol,
        detail: "p <= 40, 4 families".into(),
    })
}

fn harmonic_families() -> Result<Vec<WeightSequence>, Error> {
    Ok(vec![gevrey(2.0, N)?, q_gevrey(2.0, 2.0, N)?])
}

fn y_grid() -> Vec<f64> {
    log_grid(0.1, 1e3, 20)
}

fn c4_poisson() -> Result<Outcome, Error> {
    let tol = 1e-6;
    let mut worst_eps: f64 = 0.0;
    let mut worst_margin = f64::INFINITY;
    for seq in harmonic_families()? {
        let ev = HarmonicEvaluator::new(Omega(&seq), harmonic_quad());
        for y in y_grid() {
            let p = ev.poisson(0.0, y)?;
            let k = kappa(&Omega(&seq), y, &kappa_quad())?;
            let eps = p.abs_error + k.abs_error;
            worst_eps = worst_eps.max(eps / (1.0 + k.value));
            let lower = p.value - (k.value / PI - eps);
            let upper = k.value + eps - p.value;
            worst_margin = worst_margin.min(lower.min(upper));
        }
    }
    Ok(Outcome {
        pass: worst_eps <= tol && worst_margin >= 0.0,
        measured: worst_eps,
        expected: "k/pi - e <= P(iy) <= k + e with e/(1+k) <= tol".into(),
        tolerance: tol,
        detail: format!("worst sandwich margin {worst_margin:.3e}"),
    })
}

fn c5_komatsu() -> Result<Outcome, Error> {
    let tol = 1e-6;
    let mut errs = Vec::new();
    for seq in harmonic_families()? {
        let af = AssociatedFunctions::new(&seq);
        for y in y_grid() {
            let k = kappa(&Omega(&seq), y, &kappa_quad())?.value;
            let rhs = af.omega(y)? + kappa_nu_exact(&seq, y)?;
            errs.push((k - rhs).abs() / k.abs());
        }
    }
    let m = worst(errs);
    Ok(Outcome {
        pass: m <= tol,
        measured: m,
        expected: "|k_w - (w + k_nu)| / k_w <= tol".into(),
        tolerance: tol,
        detail: "gevrey(2), q_gevrey(2,2); 20 points".into(),
    })
}

fn c6_conjugate() -> Result<Outcome, Error> {
    let tol = 1e-8;
    let seq = q_gevrey(2.0, 2.0, N)?;
    let ev = HarmonicEvaluator::new(Omega(&seq), harmonic_quad());
    let mut errs = Vec::new();
    for y in [0.1, 1.0, 10.0] {
        let q = ev.conjugate_unfolded(0.0, y)?;
        let p = ev.poisson(0.0, y)?;
        errs.push(q.value.abs() / (1.0 + p.value));
    }
    let m = worst(errs);
    Ok(Outcome {
        pass: m <= tol,
        measured: m,
        expected: "|Q(iy)| / (1 + P(iy)) <= tol".into(),
        tolerance: tol,
        detail: "y in {0.1, 1, 10}".into(),
    })
}

fn c7_langenbruch() -> Result<Outcome, Error> {
    let tol = 0.1;
    let quad = harmonic_quad();
    let mut drifts = Vec::new();
    let mut detail = String::new();
    for seq in harmonic_families()? {
        let a = langenbruch_fit(&seq, &log_grid(0.1, 1e3, 24), &quad)?;
        let b = langenbruch_fit(&seq, &log_grid(0.1, 1e7, 48), &quad)?;
        let (ca, cb) = (a.constant("C").unwrap_or(f64::NAN), b.constant("C").unwrap_or(f64::NAN));
        let ok = a.pass && b.pass && ca.is_finite() && cb.is_finite();
        drifts.push(if ok { (cb - ca).abs() / ca } else { f64::NAN });
        detail.push_str(&format!("{}: C {ca:.4} -> {cb:.4}; ", seq.label()));
    }
    let nq = matches!(langenbruch_fit(&gevrey(0.5, N)?, &y_grid(), &quad), Err(Error::NqViolation(_)));
    detail.push_str(&format!("gevrey(0.5) rejected: {nq}"));
    let m = worst(drifts);
    Ok(Outcome {
        pass: m < tol && nq,
        measured: m,
        expected: "relative drift of C when the y-span doubles < tol".into(),
        tolerance: tol,
        detail,
    })
}

fn c8_q_sandwich() -> Result<Outcome, Error> {
    let tol = -1e-12;
    let mut slack = f64::INFINITY;
    for (q, sigma) in [(2.0, 2.0), (E, 2.0), (2.0, 1.5)] {
        let seq = q_gevrey(q, sigma, N)?;
        let af = AssociatedFunctions::new(&seq);
        let lo = q.powf(2.0 * sigma) * (1.0 + 1e-9);
        for t in log_grid(lo, 1e200, 60) {
            let (lower, upper) = q_gevrey_omega_bounds(q, sigma, t)?;
            let w = af.omega(t)?;
            slack = slack.min((w - lower).min(upper - w));
        }
    }
    Ok(Outcome {
        pass: slack >= tol,
        measured: slack,
        expected: "min slack of b ln^s t - ln t <= w <= b ln^s t >= tol".into(),
        tolerance: tol,
        detail: "(q, sigma) in {(2,2), (e,2), (2,1.5)}; t in (q^(2 sigma), 1e200]".into(),
    })
}

fn flat_case(f: &FlatFunction, seq: &WeightSequence) -> Result<FlatnessReport, Error> {
    Ok(pipelines::verify_flatness(f, seq, &FlatnessGrid::standard(), &FlatnessConfig::default())?.0)
}

fn c9_flatness() -> Result<Outcome, Error> {
    let cases: [(&str, FlatFunction, WeightSequence); 4] = [
        ("a", flat_q_gevrey_s2(2.0, 2.0)?, q_gevrey(2.0, 2.0, N)?),
        ("b", flat_q_gevrey_sgamma(2.0, 2.0, 4.0)?, q_gevrey(2.0, 2.0, N)?),
        ("c", flat_halfplane(&gevrey(2.0, N)?)?, gevrey(2.0, N)?),
        ("d", reference_exp(Sector::new(0.5)?), gevrey(1.0, N)?),
    ];
    let mut pass = true;
    let mut margin = f64::INFINITY;
    let mut detail = String::new();
    for (tag, f, seq) in &cases {
        let r = flat_case(f, seq)?;
        let finite = [r.k1, r.k2, r.k3, r.k4].iter().all(|k| k.is_finite() && *k > 0.0);
        let m = r.worst_margin_lower.min(r.worst_margin_upper);
        pass &= r.pass && finite && m >= 0.0;
        margin = margin.min(m);
        detail.push_str(&format!("({tag}) K = [{:.3e}, {:.3e}, {:.3e}, {:.3e}] {}; ", r.k1, r.k2, r.k3, r.k4, r.pass));
    }
    Ok(Outcome {
        pass,
        measured: margin,
        expected: "finite K1..K4 and worst margin >= 0".into(),
        tolerance: 0.0,
        detail: detail.trim_end_matches("; ").into(),
    })
}

fn c10_moments() -> Result<Outcome, Error> {
    let tol = 1e-8;
    let g1 = gevrey(1.0, 64)?;
    let k = kernel_from_flat(&reference_exp(Sector::new(1.0)?));
    let mk = pipelines::moments(&k, &g1, 20, &moment_quad())?;
    let mut ln_fact = 0.0;
    let mut errs = Vec::new();
    for p in 0..=20 {
        if p > 0 {
            ln_fact += (p as f64).ln();
        }
        errs.push((mk.log_moment(p) - ln_fact).exp_m1().abs());
    }
    let m = worst(errs);
    let seq = q_gevrey(2.0, 2.0, 64)?;
    let kq = kernel_from_flat(&flat_q_gevrey_s2(2.0, 2.0)?);
    let mq = pipelines::moments(&kq, &seq, 25, &moment_quad())?;
    let (b1, b2) = (mq.b1(), mq.b2());
    let band = mq.log_root_ratios(&seq).iter().all(|&v| v >= b1.ln() - 1e-12 && v <= b2.ln() + 1e-12);
    let ratio = b2 / b1;
    Ok(Outcome {
        pass: m <= tol && band && b1 > 0.0 && ratio < 50.0,
        measured: m,
        expected: "|m(p)/p! - 1| <= tol for p <= 20; B2/B1 < 50".into(),
        tolerance: tol,
        detail: format!("q-gevrey kernel B1 {b1:.5}, B2 {b2:.5}, B2/B1 {ratio:.4}, band holds {band}"),
    })
}

fn c11_extension() -> Result<Outcome, Error> {
    let tol = 0.05;
    let seq = q_gevrey(2.0, 2.0, 64)?;
    let flat = flat_q_gevrey_s2(2.0, 2.0)?;
    let kernel = kernel_from_flat(&flat);
    let mk = pipelines::moments(&kernel, &seq, 40, &moment_quad())?;
    let f = FormalSeries::alternating_mp(&seq, 1.0, 40)?;
    let op = ExtensionOperator::new(&f, &mk, &ExtendConfig::default())?;
    let grid = polar_grid(&log_grid(1e-4, 0.5, 12), 9, 0.9 * PI);
    let flat_report = flat_case(&flat, &seq)?;
    let (report, _) = pipelines::verify_asymptotics(&op, &mk, &grid, 15, Some(&flat_report))?;

    let quotients = |x: f64| -> Result<Vec<f64>, Error> {
        let err = op.remainders(Polar::new(x, 0.0), 6)?;
        Ok((0..=5).map(|p| (err[p] / (f.coeff(p) * Complex64::new(x.powi(p as i32), 0.0))).re).collect())
    };
    let x = 1e-4;
    let q0 = quotients(x)?;
    let q1 = quotients(x / 2.0)?;
    let dev = worst(q0.iter().map(|v| (v - 1.0).abs()));
    let richardson: Vec<f64> = q0.iter().zip(&q1).map(|(a, b)| 2.0 * b - a).collect();
    let fmt = |v: &[f64]| v.iter().map(|q| format!("{q:.5}")).collect::<Vec<_>>().join(", ");
    Ok(Outcome {
        pass: report.pass && dev <= tol,
        measured: dev,
        expected: "asymptotics pass; |quotient_p - 1| <= tol at x = 1e-4, p <= 5".into(),
        tolerance: tol,
        detail: format!(
            "C {:.3e}, c {:.4}, theoretical c {:.4}, pass {}; quotients [{}]; Richardson limit [{}]",
            report.c_const,
            report.c,
            report.theoretical_c.unwrap_or(f64::NAN),
            report.pass,
            fmt(&q0),
            fmt(&richardson)
        ),
    })
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn c12_convolution() -> Result<Outcome, Error> {
    let tol = 1e-12;
    let g = gevrey(1.0, N)?;
    let l = convolve(&g, &g)?;
    let mut closed: f64 = 0.0;
    for p in 0..=l.len() {
        let v = ln_factorial(p / 2) + ln_factorial(p.div_ceil(2));
        closed = closed.max((l.log_term(p) - v).abs() / v.abs().max(1.0));
    }
    let (al, ag) = (AssociatedFunctions::new(&l), AssociatedFunctions::new(&g));
    let lq = l.log_quotients();
    let mut omega_err: f64 = 0.0;
    let mut h_err: f64 = 0.0;
    for t in log_grid(0.1, 0.5 * lq[lq.len() - 1].exp(), 60) {
        omega_err = omega_err.max((al.omega(t)? - 2.0 * ag.omega(t)?).abs());
        h_err = h_err.max((al.ln_h(1.0 / t)? - 2.0 * ag.ln_h(1.0 / t)?).exp_m1().abs());
    }
    let qg = q_gevrey(2.0, 2.0, 64)?;
    let lqg = convolve(&qg, &qg)?;
    let ln2 = 2f64.ln();
    let mut q_err: f64 = 0.0;
    for p in 0..=30usize {
        let pf = p as f64;
        let even = 2.0 * pf.powi(2) * ln2;
        let odd = (pf.powi(2) + (pf + 1.0).powi(2)) * ln2;
        q_err = q_err.max((lqg.log_term(2 * p) - even).abs() / even.max(1.0));
        q_err = q_err.max((lqg.log_term(2 * p + 1) - odd).abs() / odd.max(1.0));
    }
    let mut b_err: f64 = 0.0;
    for (q, sigma) in [(2.0f64, 2.0f64), (E, 2.0), (2.0, 1.5), (5.0, 1.25)] {
        let s = sigma / (sigma - 1.0);
        let qq = q.powf(2f64.powf(1.0 - sigma));
        b_err = b_err.max((q_gevrey_b(qq, s) / (2.0 * q_gevrey_b(q, s)) - 1.0).abs());
    }
    let pass = closed <= tol && omega_err <= 1e-10 && h_err <= tol && q_err <= tol && b_err <= 1e-14;
    Ok(Outcome {
        pass,
        measured: closed.max(h_err).max(q_err),
        expected: "log-domain identities within tol; w additivity 1e-10; b identity 1e-14".into(),
        tolerance: tol,
        detail: format!(
            "closed form {closed:.2e}, w additivity {omega_err:.2e}, h product {h_err:.2e}, q-gevrey {q_err:.2e}, b {b_err:.2e}"
        ),
    })
}

fn c13_certificates() -> Result<Outcome, Error> {
    let qg = q_gevrey(2.0, 2.0, 200)?;
    let lc = check_property(&qg, Property::Lc);
    let dc = check_property(&qg, Property::Dc);
    let snq = check_property(&qg, Property::Snq);
    let mg = check_property(&qg, Property::Mg);
    let mg_growing = mg.trajectory.windows(2).all(|w| w[1].1 > w[0].1) && mg.trajectory.len() >= 2;
    let g1 = check_property(&gevrey(1.0, 200)?, Property::Mg);
    let ab = check_property(&m_alpha_beta(0.0, 1.0, 200)?, Property::Snq);
    let holds = |v: Verdict| v == Verdict::HoldsOnPrefix;
    let checks = [
        ("q lc", holds(lc.verdict)),
        ("q dc", holds(dc.verdict) && dc.fitted_constant < 4.0),
        ("q snq", holds(snq.verdict)),
        ("q mg fails", mg.verdict == Verdict::FailsOnPrefix && mg_growing),
        ("gevrey(1) mg", holds(g1.verdict) && g1.fitted_constant <= 2.0),
        ("M_0,1 snq fails", ab.verdict == Verdict::FailsOnPrefix),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Ok(Outcome {
        pass: failed.is_empty(),
        measured: failed.len() as f64,
        expected: "0 failed certificate checks".into(),
        tolerance: 0.0,
        detail: format!(
            "q dc D {:.4}, q snq B {:.4}, q mg trajectory {:?}, gevrey(1) mg A {:.4}; failed {:?}",
            dc.fitted_constant, snq.fitted_constant, mg.trajectory, g1.fitted_constant, failed
        ),
    })
}

fn c14_gamma() -> Result<Outcome, Error> {
    let g15 = gamma_estimate(&gevrey(1.5, 512)?);
    let qg = gamma_estimate(&q_gevrey(2.0, 2.0, 512)?);
    let g1 = gevrey(1.0, 512)?;
    let base = gamma_estimate(&g1);
    let squared = gamma_estimate(&power(&g1, 2.0)?);
    let power_gap = (squared.value() - 2.0 * base.value()).abs();
    let in_band = !g15.is_capped() && (1.4..=1.6).contains(&g15.value());
    let pass = in_band && qg.is_capped() && !base.is_capped() && !squared.is_capped() && power_gap <= 0.15;
    Ok(Outcome {
        pass,
        measured: power_gap,
        expected: "gevrey(1.5) in [1.4, 1.6]; q-gevrey capped; |g(M^2) - 2g(M)| <= tol".into(),
        tolerance: 0.15,
        detail: format!(
            "gevrey(1.5) {:?}, q_gevrey(2,2) {:?}, gevrey(1) {:?}, gevrey(1)^2 {:?}",
            g15, qg, base, squared
        ),
    })
}
