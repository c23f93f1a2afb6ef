//! Adaptive Gauss-Kronrod (7/15) quadrature with initial breakpoints, plus a
//! semi-infinite driver in logarithmic coordinates with tail extrapolation.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath::{exp, ln, powf};

/// Tolerances for one adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-9, rel_tol: 1e-7, max_subdivisions: 20_000 }
    }
}

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Value, absolute error estimate and number of integrand calls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadEstimate<T> {
    pub value: T,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Something that can be integrated: real or complex.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<T: QuadValue, F: FnMut(f64) -> Result<T>>(f: &mut F, a: f64, b: f64) -> Result<(T, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = fc.magnitude() * WGK[7];
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kron = kron + (f1 + f2) * WGK[j];
        abs_k += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut asc = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let value = kron * h;
    let resabs = abs_k * h.abs();
    let resasc = asc * h.abs();
    let mut err = ((kron - gauss) * h).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1f64.min(powf(200.0 * err / resasc, 1.5));
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    if !err.is_finite() || !value.magnitude().is_finite() {
        return Err(Error::Tolerance { value: value.magnitude(), abs_error: f64::INFINITY });
    }
    Ok((value, err))
}

/// Integrates `f` over `[a, b]`, splitting first at any `breakpoints` strictly
/// inside the interval.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], cfg: &QuadConfig) -> Result<QuadEstimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    if a == b {
        return Ok(QuadEstimate { value: T::zero(), abs_error: 0.0, evaluations: 0 });
    }
    if b < a {
        let r = integrate(f, b, a, breakpoints, cfg)?;
        return Ok(QuadEstimate { value: r.value * -1.0, ..r });
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(a);
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let mut heap = BinaryHeap::new();
    let mut frozen_error = 0.0;
    let mut frozen_value = T::zero();
    let mut total = T::zero();
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1])?;
        evaluations += 15;
        total = total + v;
        total_err += e;
        heap.push(Piece { a: w[0], b: w[1], value: v, error: e });
    }
    let mut pieces = heap.len();
    let min_width = 64.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    loop {
        if total_err <= cfg.target(total.magnitude()) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if worst.b - worst.a <= min_width {
            frozen_error += worst.error;
            frozen_value = frozen_value + worst.value;
            continue;
        }
        if pieces >= cfg.max_subdivisions {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&mut f, worst.a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, worst.b)?;
        evaluations += 30;
        pieces += 1;
        total = total - worst.value + v1 + v2;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // resum to shed accumulated cancellation in the running totals
    let mut value = frozen_value;
    let mut abs_error = frozen_error;
    for p in heap.iter() {
        value = value + p.value;
        abs_error += p.error;
    }
    if abs_error > cfg.target(value.magnitude()) {
        return Err(Error::Tolerance { value: value.magnitude(), abs_error });
    }
    Ok(QuadEstimate { value, abs_error, evaluations })
}

/// Integrates `g(u)` over `[u0, ∞)` for `g` decaying at least exponentially
/// in `u` (the log-coordinate image of an integrand that decays faster than
/// `1/t` in `t = e^u`).
///
/// The range is extended in steps until the extrapolated tail
/// `|g(U)| / λ`, with `λ` the local decay rate, falls below a tenth of the
/// tolerance. The tail estimate is added to the value and to the error.
pub fn integrate_log_tail<T, F>(mut g: F, u0: f64, breakpoints: &[f64], cfg: &QuadConfig) -> Result<QuadEstimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    const U_MAX: f64 = 700.0;
    let mut lo = u0;
    let mut step = 8.0;
    let mut value = T::zero();
    let mut abs_error = 0.0;
    let mut evaluations = 0;
    loop {
        let hi = (lo + step).min(U_MAX);
        let part = integrate(&mut g, lo, hi, breakpoints, &QuadConfig { abs_tol: cfg.abs_tol * 0.25, ..*cfg })?;
        value = value + part.value;
        abs_error += part.abs_error;
        evaluations += part.evaluations;
        let g_hi = g(hi)?;
        let g_prev = g(hi - 1.0)?;
        evaluations += 2;
        let (m_hi, m_prev) = (g_hi.magnitude(), g_prev.magnitude());
        if m_hi == 0.0 {
            break;
        }
        let rate = ln(m_prev / m_hi);
        let target = cfg.target(value.magnitude());
        if rate > 1e-3 {
            let tail = g_hi * (1.0 / rate);
            if tail.magnitude() <= 0.1 * target || hi >= U_MAX {
                value = value + tail;
                abs_error += 0.1 * tail.magnitude() + if hi >= U_MAX { tail.magnitude() } else { 0.0 };
                break;
            }
        } else if hi - u0 > 64.0 || hi >= U_MAX {
            return Err(Error::NonQuasianalytic { at: exp(hi.min(U_MAX)) });
        }
        if hi >= U_MAX {
            return Err(Error::NonQuasianalytic { at: exp(U_MAX) });
        }
        lo = hi;
        step *= 2.0;
    }
    if abs_error > cfg.target(value.magnitude()) * 1.5 {
        return Err(Error::Tolerance { value: value.magnitude(), abs_error });
    }
    Ok(QuadEstimate { value, abs_error, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fmath::{cos, sin, sqrt};

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| Ok(x * x * x - 2.0 * x), 0.0, 2.0, &[], &QuadConfig::default()).unwrap();
        assert!((r.value - 0.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory() {
        let r =
            integrate(|x: f64| Ok(sin(x)), 0.0, core::f64::consts::PI, &[], &QuadConfig::new(1e-13, 1e-13)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| Ok(1.0 / sqrt(x)), 0.0, 1.0, &[], &QuadConfig::new(1e-6, 1e-6)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn step_with_breakpoint() {
        let f = |x: f64| Ok(if x < 0.3 { 1.0 } else { 3.0 });
        let r = integrate(f, 0.0, 1.0, &[0.3], &QuadConfig::new(1e-12, 1e-12)).unwrap();
        assert!((r.value - (0.3 + 2.1)).abs() < 1e-12);
        let r = integrate(f, 0.0, 1.0, &[], &QuadConfig::new(1e-10, 1e-10)).unwrap();
        assert!((r.value - 2.4).abs() < 1e-9);
    }

    #[test]
    fn complex_integrand() {
        let f = |x: f64| Ok(Complex64::new(cos(x), sin(x)));
        let r = integrate(f, 0.0, 1.0, &[], &QuadConfig::new(1e-13, 1e-13)).unwrap();
        assert!((r.value - Complex64::new(sin(1.0), 1.0 - cos(1.0))).norm() < 1e-13);
    }

    #[test]
    fn reversed_limits() {
        let r = integrate(|x: f64| Ok(x), 1.0, 0.0, &[], &QuadConfig::default()).unwrap();
        assert!((r.value + 0.5).abs() < 1e-14);
    }

    #[test]
    fn log_tail_of_inverse_square() {
        // ∫_1^∞ dt/t² = 1, in u = ln t: ∫_0^∞ e^{-u} du
        let r = integrate_log_tail(|u: f64| Ok(exp(-u)), 0.0, &[], &QuadConfig::new(1e-12, 1e-10)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn log_tail_detects_divergence() {
        let r = integrate_log_tail(|_u: f64| Ok(1.0), 0.0, &[], &QuadConfig::default());
        assert!(matches!(r, Err(Error::NonQuasianalytic { .. })));
    }

    #[test]
    fn subdivision_budget_reported() {
        let cfg = QuadConfig::new(1e-15, 1e-15).with_max_subdivisions(2);
        let r = integrate(|x: f64| Ok(sin(50.0 * x)), 0.0, 10.0, &[], &cfg);
        assert!(matches!(r, Err(Error::Tolerance { .. })));
    }
}
