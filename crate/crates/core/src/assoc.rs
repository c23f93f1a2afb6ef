//! Associated functions `ν_m`, `ω_M`, `h_M` and the concave majorant `κ_σ`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath::{exp, ln, powf};
use crate::quad::{integrate_log_tail, QuadConfig, QuadEstimate};
use crate::report::{FitReport, GridDescriptor};
use crate::weight_seq::{check_property, Property, Verdict, WeightSequence};

/// A real function on `[0, ∞)` used as the boundary data `σ` of harmonic
/// extensions and of `κ_σ`.
pub trait Weight {
    fn eval(&self, t: f64) -> Result<f64>;

    /// Points in `(lo, hi)` where `eval` is not smooth, ascending, at most
    /// `limit` of them. Used to seed quadrature breakpoints.
    fn knots(&self, _lo: f64, _hi: f64, _limit: usize) -> Vec<f64> {
        Vec::new()
    }
}

impl<W: Weight + ?Sized> Weight for &W {
    fn eval(&self, t: f64) -> Result<f64> {
        (**self).eval(t)
    }
    fn knots(&self, lo: f64, hi: f64, limit: usize) -> Vec<f64> {
        (**self).knots(lo, hi, limit)
    }
}

/// Wraps a plain closure as a [`Weight`].
#[derive(Clone, Copy, Debug)]
pub struct FnWeight<F>(pub F);

impl<F: Fn(f64) -> f64> Weight for FnWeight<F> {
    fn eval(&self, t: f64) -> Result<f64> {
        Ok((self.0)(t))
    }
}

/// `ω_M` as a [`Weight`].
#[derive(Clone, Copy, Debug)]
pub struct Omega<'a>(pub &'a WeightSequence);

/// `ν_m` as a [`Weight`].
#[derive(Clone, Copy, Debug)]
pub struct Nu<'a>(pub &'a WeightSequence);

impl Weight for Omega<'_> {
    fn eval(&self, t: f64) -> Result<f64> {
        AssociatedFunctions::new(self.0).omega(t)
    }
    fn knots(&self, lo: f64, hi: f64, limit: usize) -> Vec<f64> {
        AssociatedFunctions::new(self.0).knots(lo, hi, limit)
    }
}

impl Weight for Nu<'_> {
    fn eval(&self, t: f64) -> Result<f64> {
        AssociatedFunctions::new(self.0).nu(t)
    }
    fn knots(&self, lo: f64, hi: f64, limit: usize) -> Vec<f64> {
        AssociatedFunctions::new(self.0).knots(lo, hi, limit)
    }
}

/// `ln M_p` recovered from `ω` by the two routes of the duality formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveredTerm {
    /// `p ln m_{p−1} − ω(m_{p−1})`.
    pub at_knot: f64,
    /// Golden-section maximum of `p u − ω(e^u)`.
    pub by_search: f64,
    /// Location `t` of the search maximum.
    pub argmax: f64,
}

/// Evaluators for the functions associated with one sequence.
///
/// Evaluation is exact (piecewise closed form) for `t ≤ m_{N−1}`; beyond
/// that the sequence's tail model is used, or a domain error is returned.
#[derive(Clone, Copy, Debug)]
pub struct AssociatedFunctions<'a> {
    seq: &'a WeightSequence,
}

impl<'a> AssociatedFunctions<'a> {
    pub fn new(seq: &'a WeightSequence) -> Self {
        Self { seq }
    }

    pub fn seq(&self) -> &'a WeightSequence {
        self.seq
    }

    /// Largest `t` evaluated from the prefix alone.
    pub fn domain_limit(&self) -> f64 {
        self.seq.domain_limit()
    }

    fn in_prefix(&self, ln_t: f64) -> bool {
        ln_t <= self.seq.log_quotient(self.seq.len() - 1)
    }

    fn domain_error(&self, t: f64) -> Error {
        Error::Domain { value: t, limit: self.domain_limit() }
    }

    /// `ν(λ) = #{p : m_p ≤ λ}` (integral-valued; `f64` because the tail
    /// models can exceed every integer type).
    pub fn nu(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Ok(0.0);
        }
        let ln_l = ln(lambda);
        let lq = self.seq.log_quotients();
        if self.in_prefix(ln_l) {
            if self.seq.is_log_convex() {
                return Ok(lq.partition_point(|&v| v <= ln_l) as f64);
            }
            return Ok(lq.iter().filter(|&&v| v <= ln_l).count() as f64);
        }
        self.seq.tail().nu(ln_l).ok_or_else(|| self.domain_error(lambda))
    }

    /// `ω(t) = sup_p ln(t^p / M_p)` by the sup route, checked against the
    /// integral route on the prefix.
    pub fn omega(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Ok(0.0);
        }
        let ln_t = ln(t);
        if ln_t <= self.seq.log_quotient(0) {
            return Ok(0.0);
        }
        if !self.in_prefix(ln_t) {
            return self.seq.tail().omega(ln_t).ok_or_else(|| self.domain_error(t));
        }
        if !self.seq.is_log_convex() {
            return Ok(self.omega_brute(ln_t));
        }
        let p = self.seq.log_quotients().partition_point(|&v| v <= ln_t);
        let sup = p as f64 * ln_t - self.seq.log_term(p);
        let integral = self.omega_integral_at(p, ln_t);
        let scale = p as f64 * ln_t.abs() + self.seq.log_term(p).abs();
        if (sup - integral).abs() > 1e-10 + 8.0 * f64::EPSILON * scale {
            return Err(Error::Consistency(format!(
                "omega routes disagree at t = {t}: sup {sup}, integral {integral}"
            )));
        }
        Ok(sup)
    }

    /// Sup route only (prefix domain).
    pub fn omega_sup(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Ok(0.0);
        }
        let ln_t = ln(t);
        if !self.in_prefix(ln_t) {
            return Err(self.domain_error(t));
        }
        let p = self.nu(t)? as usize;
        Ok(p as f64 * ln_t - self.seq.log_term(p))
    }

    /// Integral route `∫_0^t ν(λ)/λ dλ` (prefix domain, log-convex sequences).
    pub fn omega_integral(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Ok(0.0);
        }
        let ln_t = ln(t);
        if !self.in_prefix(ln_t) {
            return Err(self.domain_error(t));
        }
        if !self.seq.is_log_convex() {
            return Err(Error::Precondition(String::from("integral route needs nondecreasing quotients")));
        }
        let p = self.seq.log_quotients().partition_point(|&v| v <= ln_t);
        Ok(self.omega_integral_at(p, ln_t))
    }

    fn omega_integral_at(&self, p: usize, ln_t: f64) -> f64 {
        if p == 0 {
            return 0.0;
        }
        self.seq.omega_at_knots()[p - 1] + p as f64 * (ln_t - self.seq.log_quotient(p - 1))
    }

    fn omega_brute(&self, ln_t: f64) -> f64 {
        (0..=self.seq.len()).map(|p| p as f64 * ln_t - self.seq.log_term(p)).fold(0.0, f64::max)
    }

    /// `h(t) = inf_p M_p t^p = exp(−ω(1/t))`, with `h(0) = 0`.
    pub fn h(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Ok(0.0);
        }
        Ok(exp(-self.omega(1.0 / t)?))
    }

    /// `ln h(t) = −ω(1/t)`.
    pub fn ln_h(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(-self.omega(1.0 / t)?)
    }

    /// `ln inf_p M_p t^p` taken directly over the prefix; `Domain` if the
    /// infimum sits at the last stored index.
    pub fn ln_h_inf(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Ok(f64::NEG_INFINITY);
        }
        let ln_t = ln(t);
        let n = self.seq.len();
        let (arg, v) = (0..=n).map(|p| (p, self.seq.log_term(p) + p as f64 * ln_t)).fold((0, f64::INFINITY), |b, c| {
            if c.1 < b.1 {
                c
            } else {
                b
            }
        });
        if arg == n {
            return Err(self.domain_error(1.0 / t));
        }
        Ok(v)
    }

    /// Recovers `ln M_p = sup_t (p ln t − ω(t))`.
    pub fn recover_log_term(&self, p: usize) -> Result<RecoveredTerm> {
        let n = self.seq.len();
        if p >= n {
            return Err(Error::Parameter(format!("order {p} beyond prefix {n}")));
        }
        if !self.seq.is_log_convex() {
            return Err(Error::Precondition(String::from("recovery needs nondecreasing quotients")));
        }
        if p == 0 {
            return Ok(RecoveredTerm { at_knot: 0.0, by_search: 0.0, argmax: 0.0 });
        }
        let knot = self.seq.log_quotient(p - 1);
        let at_knot = p as f64 * knot - self.omega(exp(knot))?;
        let lo = knot - 2.0;
        let hi = self.seq.log_quotient(p).min(self.seq.log_quotient(n - 1)) + 2.0;
        let hi = if self.seq.tail().is_none() { hi.min(self.seq.log_quotient(n - 1)) } else { hi };
        let phi = |u: f64| -> Result<f64> { Ok(p as f64 * u - self.omega(exp(u))?) };
        let (u, by_search) = golden_max(phi, lo, hi)?;
        let target = self.seq.log_term(p);
        let tol = 1e-9 * target.abs().max(1.0);
        if (at_knot - target).abs() > tol || (by_search - target).abs() > tol {
            return Err(Error::Consistency(format!(
                "recovered ln M_{p}: knot {at_knot}, search {by_search}, stored {target}"
            )));
        }
        Ok(RecoveredTerm { at_knot, by_search, argmax: exp(u) })
    }

    /// Quotient values `m_p` in `(lo, hi)`, ascending, at most `limit`.
    pub fn knots(&self, lo: f64, hi: f64, limit: usize) -> Vec<f64> {
        let mut out = Vec::new();
        if !(hi > lo) || limit == 0 {
            return out;
        }
        let (ln_lo, ln_hi) = (if lo > 0.0 { ln(lo) } else { f64::NEG_INFINITY }, ln(hi));
        let lq = self.seq.log_quotients();
        for &v in lq {
            if v > ln_lo && v < ln_hi {
                if out.len() >= limit {
                    return out;
                }
                out.push(exp(v));
            }
        }
        let mut p = lq.len() as f64;
        while out.len() < limit {
            match self.seq.tail().log_quotient(p) {
                Some(v) if v < ln_hi => {
                    if v > ln_lo {
                        out.push(exp(v));
                    }
                }
                _ => break,
            }
            p += 1.0;
        }
        out
    }
}

/// Maximizes a concave function on `[lo, hi]`; returns `(argmax, max)`.
fn golden_max(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Default tolerances for `κ`: relative `1e-8`.
pub fn kappa_quad() -> QuadConfig {
    QuadConfig { abs_tol: 1e-12, rel_tol: 1e-8, max_subdivisions: 50_000 }
}

/// `κ_σ(y) = ∫_1^∞ σ(ys)/s² ds`, computed as `∫_0^∞ σ(y e^u) e^{−u} du`
/// with an extrapolated tail.
///
/// A tail that does not decay (σ growing at least linearly on the sampled
/// range) is reported as [`Error::NonQuasianalytic`].
pub fn kappa<W: Weight>(sigma: &W, y: f64, quad: &QuadConfig) -> Result<QuadEstimate<f64>> {
    if !(y > 0.0) {
        return Ok(QuadEstimate { value: sigma.eval(0.0)?, abs_error: 0.0, evaluations: 1 });
    }
    let breaks: Vec<f64> = sigma.knots(y, y * 1e250, 1024).into_iter().map(|k| ln(k / y)).collect();
    integrate_log_tail(|u| Ok(sigma.eval(y * exp(u))? * exp(-u)), 0.0, &breaks, quad)
}

/// Exact `κ_ν(y) = ν(y) + y Σ_{m_p > y} 1/m_p`, summed over the prefix and
/// continued through the tail model. Terms beyond `2^20` indices are replaced
/// by the integral of their local power law.
pub fn kappa_nu_exact(seq: &WeightSequence, y: f64) -> Result<f64> {
    let af = AssociatedFunctions::new(seq);
    let nu = af.nu(y)?;
    let ln_y = ln(y);
    let mut sum = 0.0;
    for &v in seq.log_quotients() {
        if v > ln_y {
            sum += exp(ln_y - v);
        }
    }
    let tail = seq.tail();
    if tail.is_none() {
        return Err(Error::Domain { value: y, limit: seq.domain_limit() });
    }
    let quotient = |p: f64| {
        tail.log_quotient(p).ok_or_else(|| Error::Precondition(String::from("tail model has no closed-form quotients")))
    };
    const LAST: f64 = 1_048_576.0;
    let mut p = seq.len() as f64;
    while p <= LAST {
        let v = quotient(p)?;
        if v > ln_y {
            let term = exp(ln_y - v);
            sum += term;
            if term < 1e-17 * sum {
                return Ok(nu + sum);
            }
        }
        p += 1.0;
    }
    // Σ_{k > K} c k^{-a} ≈ ∫_{K+1/2}^∞ c x^{-a} dx with k = p + 1 and K = LAST
    let (v_half, v_last) = (quotient(LAST / 2.0 - 1.0)?, quotient(LAST - 1.0)?);
    let a = (v_last - v_half) / core::f64::consts::LN_2;
    if !(a > 1.0) {
        return Err(Error::NonQuasianalytic { at: exp(v_last) });
    }
    let k = LAST + 0.5;
    sum += exp(ln_y - v_last) * k / (a - 1.0) * powf(LAST / k, a);
    Ok(nu + sum)
}

/// `b_{q,s} = (1/s)((s−1)/(s ln q))^{s−1}`.
pub fn q_gevrey_b(q: f64, s: f64) -> f64 {
    powf((s - 1.0) / (s * ln(q)), s - 1.0) / s
}

/// Sandwich `(b lnˢt − ln t, b lnˢt)` for `ω` of the q-Gevrey sequence
/// `q^{p^σ}`, `s = σ/(σ−1)`. Requires `t > q^σ` (which also gives `t > 1`).
pub fn q_gevrey_omega_bounds(q: f64, sigma: f64, t: f64) -> Result<(f64, f64)> {
    let upper = q_gevrey_omega_upper(q, sigma, t)?;
    let threshold = powf(q, sigma);
    if !(t > threshold) {
        return Err(Error::Range(format!("lower bound needs t > q^(s/(s-1)) = {threshold}, got {t}")));
    }
    Ok((upper - ln(t), upper))
}

/// Upper bound `b lnˢt`, valid for `t > 1`.
pub fn q_gevrey_omega_upper(q: f64, sigma: f64, t: f64) -> Result<f64> {
    if !(q > 1.0) || !(sigma > 1.0 && sigma <= 2.0) {
        return Err(Error::Parameter(format!("need q > 1 and sigma in (1, 2], got ({q}, {sigma})")));
    }
    if !(t > 1.0) {
        return Err(Error::Range(format!("upper bound needs t > 1, got {t}")));
    }
    let s = sigma / (sigma - 1.0);
    Ok(q_gevrey_b(q, s) * powf(ln(t), s))
}

/// Fits `sup ω(t)/max(ν(t), 1)` on `grid` and judges whether it stays
/// bounded. With `S_k` the sup over the first `k` quarters of the grid, the
/// ratio is taken as bounded when the last increment contracts,
/// `S_4 − S_3 ≤ 0.8 (S_3 − S_2)`; a ratio growing like `ln t` has constant
/// increments on a log grid. The verdict of the prefix certificate is
/// recorded in the note.
pub fn mg_duality_check(seq: &WeightSequence, grid: &[f64]) -> Result<FitReport> {
    let af = AssociatedFunctions::new(seq);
    let mut trajectory = Vec::with_capacity(grid.len());
    for &t in grid {
        let r = af.omega(t)? / af.nu(t)?.max(1.0);
        trajectory.push((t, r));
    }
    let sup_to = |k: usize| trajectory[..(k * grid.len()).div_ceil(4)].iter().map(|x| x.1).fold(0.0, f64::max);
    let (s2, s3, sup) = (sup_to(2), sup_to(3), sup_to(4));
    let (d3, d4) = (s3 - s2, sup - s3);
    let bounded = d4 <= 0.8 * d3 || d4 <= 1e-9 * sup;
    let cert = check_property(seq, Property::Mg);
    let agrees = bounded == (cert.verdict == Verdict::HoldsOnPrefix);
    let mut constants = BTreeMap::new();
    constants.insert(String::from("ratio_sup"), sup);
    constants.insert(String::from("ratio_sup_three_quarters"), s3);
    constants.insert(String::from("mg_A"), cert.fitted_constant);
    Ok(FitReport {
        name: format!("mg_duality({})", seq.label()),
        constants,
        grid: GridDescriptor::of(grid),
        trajectory,
        worst_margin: 0.8 * d3 - d4,
        pass: bounded,
        note: format!("mg certificate {:?}; {}", cert.verdict, if agrees { "consistent" } else { "inconsistent" }),
    })
}

/// `max ν(2t)/ν(t)` over grid points with `ν(t) ≥ 1`.
pub fn nu_doubling_constant(seq: &WeightSequence, grid: &[f64]) -> Result<f64> {
    let af = AssociatedFunctions::new(seq);
    let mut best: f64 = 0.0;
    for &t in grid {
        let n = af.nu(t)?;
        if n >= 1.0 {
            best = best.max(af.nu(2.0 * t)? / n);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fmath::log_grid;
    use crate::weight_seq::{convolve, gevrey, m_alpha_beta, power, q_gevrey};

    fn sup_oracle(seq: &WeightSequence, t: f64) -> f64 {
        (0..=seq.len()).map(|p| p as f64 * ln(t) - seq.log_term(p)).fold(0.0, f64::max)
    }

    #[test]
    fn nu_examples() {
        let g = gevrey(1.0, 32).unwrap();
        let af = AssociatedFunctions::new(&g);
        assert_eq!(af.nu(3.5).unwrap(), 3.0);
        assert_eq!(af.nu(0.5).unwrap(), 0.0);
        assert_eq!(af.nu(4.0).unwrap(), 4.0);
        let q = q_gevrey(2.0, 2.0, 32).unwrap();
        assert_eq!(AssociatedFunctions::new(&q).nu(10.0).unwrap(), 2.0);
    }

    #[test]
    fn omega_examples() {
        let g = gevrey(1.0, 32).unwrap();
        let af = AssociatedFunctions::new(&g);
        let e = core::f64::consts::E;
        assert!((af.omega(e).unwrap() - (2.0 - ln(2.0))).abs() < 1e-14);
        assert_eq!(af.omega(0.9).unwrap(), 0.0);
        for p in 1..32 {
            let m = exp(g.log_quotient(p));
            let closed = p as f64 * ln(m) - g.log_term(p);
            assert!((af.omega(m).unwrap() - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn omega_matches_sup_oracle_and_tail() {
        for s in [gevrey(2.0, 64).unwrap(), q_gevrey(2.0, 1.5, 64).unwrap(), m_alpha_beta(1.0, 1.0, 64).unwrap()] {
            let af = AssociatedFunctions::new(&s);
            for t in log_grid(0.5, s.domain_limit(), 50) {
                assert!((af.omega(t).unwrap() - sup_oracle(&s, t)).abs() < 1e-10, "{} {t}", s.label());
            }
        }
        let s = gevrey(2.0, 64).unwrap();
        let af = AssociatedFunctions::new(&s);
        let long = gevrey(2.0, 2000).unwrap();
        let long_af = AssociatedFunctions::new(&long);
        for t in log_grid(s.domain_limit() * 1.01, 1e6, 30) {
            assert!((af.omega(t).unwrap() - long_af.omega(t).unwrap()).abs() < 1e-9 * af.omega(t).unwrap());
        }
        let custom = m_alpha_beta(1.0, 1.0, 16).unwrap();
        assert!(matches!(AssociatedFunctions::new(&custom).omega(1e9), Err(Error::Domain { .. })));
    }

    #[test]
    fn h_examples() {
        let g = gevrey(1.0, 32).unwrap();
        let af = AssociatedFunctions::new(&g);
        assert!((af.h(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(af.h(1.0).unwrap(), 1.0);
        assert_eq!(af.h(7.0).unwrap(), 1.0);
        assert_eq!(af.h(0.0).unwrap(), 0.0);
        for t in log_grid(1.0 / g.domain_limit(), 2.0, 40) {
            let brute = (0..=32).map(|p| g.log_term(p) + p as f64 * ln(t)).fold(f64::INFINITY, f64::min);
            assert!((af.h(t).unwrap() - exp(brute)).abs() < 1e-12);
        }
    }

    #[test]
    fn recovery() {
        for s in [gevrey(1.0, 48).unwrap(), q_gevrey(2.0, 2.0, 48).unwrap()] {
            let af = AssociatedFunctions::new(&s);
            for p in 0..=40 {
                let r = af.recover_log_term(p).unwrap();
                assert!((r.by_search - s.log_term(p)).abs() <= 1e-9 * s.log_term(p).abs().max(1.0));
                if p > 0 {
                    let (lo, hi) = (exp(s.log_quotient(p - 1)), exp(s.log_quotient(p)));
                    assert!(r.argmax >= lo * (1.0 - 1e-9) && r.argmax <= hi * (1.0 + 1e-9));
                }
            }
        }
        let q = q_gevrey(2.0, 2.0, 32).unwrap();
        let r = AssociatedFunctions::new(&q).recover_log_term(5).unwrap();
        assert!((r.at_knot - 25.0 * ln(2.0)).abs() < 1e-12);
    }

    #[test]
    fn kappa_constant_and_linear() {
        let c = FnWeight(|_t: f64| 2.5);
        let k = kappa(&c, 3.0, &kappa_quad()).unwrap();
        assert!((k.value - 2.5).abs() < 1e-9);
        let lin = FnWeight(|t: f64| t);
        assert!(matches!(kappa(&lin, 1.0, &kappa_quad()), Err(Error::NonQuasianalytic { .. })));
    }

    #[test]
    fn komatsu_relation() {
        let s = gevrey(2.0, 128).unwrap();
        let loose = QuadConfig::new(1e-12, 1e-5).with_max_subdivisions(100_000);
        for y in log_grid(0.1, 1e4, 12) {
            let ko = kappa(&Omega(&s), y, &kappa_quad()).unwrap().value;
            let exact = kappa_nu_exact(&s, y).unwrap();
            let w = AssociatedFunctions::new(&s).omega(y).unwrap();
            assert!((ko - (w + exact)).abs() <= 1e-8 * ko.max(1.0), "y={y}");
            assert!(ko >= w);
            // the step function ν only admits a loose quadrature
            let kn = kappa(&Nu(&s), y, &loose).unwrap().value;
            assert!((kn - exact).abs() <= 1e-5 * exact.max(1.0), "y={y} {kn} {exact}");
        }
    }

    #[test]
    fn q_gevrey_bounds() {
        assert!((q_gevrey_b(core::f64::consts::E, 2.0) - 0.25).abs() < 1e-15);
        let s = q_gevrey(2.0, 2.0, 64).unwrap();
        let (lo, hi) = q_gevrey_omega_bounds(2.0, 2.0, 100.0).unwrap();
        let w = sup_oracle(&s, 100.0);
        assert!(lo <= w && w <= hi);
        assert!(q_gevrey_omega_upper(2.0, 2.0, 1.0).is_err());
        assert!(q_gevrey_omega_bounds(2.0, 2.0, 3.0).is_err());
    }

    #[test]
    fn convolution_adds_omega() {
        let a = gevrey(1.0, 64).unwrap();
        let b = gevrey(2.0, 64).unwrap();
        let l = convolve(&a, &b).unwrap();
        let (fa, fb, fl) = (AssociatedFunctions::new(&a), AssociatedFunctions::new(&b), AssociatedFunctions::new(&l));
        for t in log_grid(0.5, 60.0, 40) {
            assert!((fl.omega(t).unwrap() - fa.omega(t).unwrap() - fb.omega(t).unwrap()).abs() < 1e-10);
        }
        // beyond the merged prefix the tail models add
        assert!((fl.omega(1e5).unwrap() - fa.omega(1e5).unwrap() - fb.omega(1e5).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn power_rescales_omega() {
        let g = gevrey(1.0, 200).unwrap();
        let s = 0.5;
        let gs = power(&g, s).unwrap();
        let (f, fs) = (AssociatedFunctions::new(&g), AssociatedFunctions::new(&gs));
        for t in log_grid(0.5, 1e3, 40) {
            assert!((f.omega(powf(t, 1.0 / s)).unwrap() - fs.omega(t).unwrap() / s).abs() < 1e-9);
        }
    }

    #[test]
    fn duality_diagnostics() {
        let g = gevrey(1.0, 256).unwrap();
        let r = mg_duality_check(&g, &log_grid(2.0, 250.0, 40)).unwrap();
        assert!(r.pass, "{r:?}");
        let g2 = gevrey(2.0, 256).unwrap();
        assert!(mg_duality_check(&g2, &log_grid(0.1, 1e4, 40)).unwrap().pass);
        let q = q_gevrey(2.0, 2.0, 256).unwrap();
        let r = mg_duality_check(&q, &log_grid(2.0, 1e150, 40)).unwrap();
        assert!(!r.pass);
        let d = nu_doubling_constant(&q, &log_grid(2.0, 1e150, 40)).unwrap();
        assert!(d <= 2.0, "{d}");
    }
}
