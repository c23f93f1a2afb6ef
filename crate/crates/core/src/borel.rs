//! Moment kernels, formal power series of class `{M}` and the truncated
//! Laplace-type extension operator `T_{M,A}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flat::{FlatFunction, FlatnessReport, Polar, Sector};
use crate::fmath::{exp, ln, log_grid};
use crate::quad::{integrate_log_tail, QuadConfig, QuadEstimate};
use crate::report::{FitReport, GridDescriptor};
use crate::weight_seq::WeightSequence;

/// `e(z) = G(1/z)`.
#[derive(Clone, Debug)]
pub struct Kernel {
    flat: FlatFunction,
}

pub fn kernel_from_flat(flat: &FlatFunction) -> Kernel {
    Kernel { flat: flat.clone() }
}

impl Kernel {
    pub fn flat(&self) -> &FlatFunction {
        &self.flat
    }

    pub fn sector(&self) -> Sector {
        self.flat.sector()
    }

    /// `log e(v) = log G(1/r, −θ)`.
    pub fn log_eval(&self, v: Polar) -> Result<Complex64> {
        self.flat.log_eval(v.recip())
    }

    pub fn eval(&self, v: Polar) -> Result<Complex64> {
        Ok(self.log_eval(v)?.exp())
    }

    pub fn log_positive(&self, t: f64) -> Result<f64> {
        Ok(self.log_eval(Polar::new(t, 0.0))?.re)
    }

    pub fn eval_positive(&self, t: f64) -> Result<f64> {
        Ok(exp(self.log_positive(t)?))
    }
}

/// Tolerances for moment integrals, relative to the peak of the integrand.
pub fn moment_quad() -> QuadConfig {
    QuadConfig::new(1e-13, 1e-10).with_max_subdivisions(50_000)
}

const U_MAX: f64 = 700.0;

/// Maximizer of a unimodal `φ` on `[start, U_MAX]`: coarse scan, then golden
/// section. `None` if `φ` still increases at `U_MAX`.
fn unimodal_peak(phi: &mut dyn FnMut(f64) -> Result<f64>, start: f64) -> Result<Option<(f64, f64)>> {
    let mut best = (start, phi(start)?);
    let mut u = start;
    loop {
        u += 1.0;
        if u > U_MAX {
            return Ok(None);
        }
        let v = phi(u)?;
        if v > best.1 {
            best = (u, v);
        } else if v < best.1 - 30.0 || (u - best.0 >= 4.0 && v < best.1) {
            break;
        }
    }
    let (mut a, mut b) = (best.0 - 1.0, best.0 + 1.0);
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (phi(c)?, phi(d)?);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = phi(d)?;
        }
    }
    let m = 0.5 * (a + b);
    let fm = phi(m)?;
    Ok(Some(if fm >= best.1 { (m, fm) } else { best }))
}

/// `ln m(p)` with `m(p) = ∫_0^∞ t^p e(t) dt`, integrated in `u = ln t`
/// around the peak of `t^{p+1} e(t)`. Returns `(ln m(p), relative error)`.
pub fn log_moment(kernel: &Kernel, p: usize, quad: &QuadConfig) -> Result<(f64, f64)> {
    let k = (p + 1) as f64;
    let mut phi = |u: f64| -> Result<f64> {
        if u > U_MAX {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(k * u + kernel.log_positive(exp(u))?)
    };
    let (u_star, phi_star) = unimodal_peak(&mut phi, -40.0)?.ok_or(Error::KernelDecay { order: p })?;
    if !phi_star.is_finite() {
        return Err(Error::KernelDecay { order: p });
    }
    let right = integrate_log_tail(|v: f64| Ok(exp(phi(u_star + v)? - phi_star)), 0.0, &[], quad)?;
    let left = integrate_log_tail(|v: f64| Ok(exp(phi(u_star - v)? - phi_star)), 0.0, &[], quad)?;
    let total = right.value + left.value;
    Ok((phi_star + ln(total), (right.abs_error + left.abs_error) / total))
}

/// A kernel with its moments `m(0..=P)` and the equivalence constants
/// `m(0) B₁^p M_p ≤ m(p) ≤ m(0) B₂^p M_p`, `1 ≤ p ≤ P`.
#[derive(Clone, Debug)]
pub struct MomentKernel {
    kernel: Kernel,
    log_moments: Vec<f64>,
    rel_errors: Vec<f64>,
    ln_b1: f64,
    ln_b2: f64,
    quad: QuadConfig,
}

impl MomentKernel {
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// `P`.
    pub fn max_order(&self) -> usize {
        self.log_moments.len() - 1
    }

    pub fn log_moment(&self, p: usize) -> f64 {
        self.log_moments[p]
    }

    pub fn log_moments(&self) -> &[f64] {
        &self.log_moments
    }

    pub fn moment(&self, p: usize) -> f64 {
        exp(self.log_moments[p])
    }

    pub fn relative_errors(&self) -> &[f64] {
        &self.rel_errors
    }

    pub fn b1(&self) -> f64 {
        exp(self.ln_b1)
    }

    pub fn b2(&self) -> f64 {
        exp(self.ln_b2)
    }

    pub fn quad(&self) -> &QuadConfig {
        &self.quad
    }

    /// `(m(p)/(m(0) M_p))^{1/p}` for `1 ≤ p ≤ P`, in logs.
    pub fn log_root_ratios(&self, seq: &WeightSequence) -> Vec<f64> {
        root_ratios(&self.log_moments, seq)
    }
}

fn root_ratios(lm: &[f64], seq: &WeightSequence) -> Vec<f64> {
    (1..lm.len()).map(|p| (lm[p] - lm[0] - seq.log_term(p)) / p as f64).collect()
}

/// Moments `m(0..=p_max)` of `kernel` and the band `[B₁, B₂]` against `seq`.
pub fn moments(kernel: &Kernel, seq: &WeightSequence, p_max: usize, quad: &QuadConfig) -> Result<MomentKernel> {
    if p_max == 0 || p_max > seq.len() {
        return Err(Error::Parameter(format!("moment order {p_max} must lie in 1..={}", seq.len())));
    }
    let mut log_moments = Vec::with_capacity(p_max + 1);
    let mut rel_errors = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let (lm, err) = log_moment(kernel, p, quad)?;
        log_moments.push(lm);
        rel_errors.push(err);
    }
    from_log_moments(kernel, seq, log_moments, rel_errors, quad)
}

/// Assembles a [`MomentKernel`] from precomputed moments.
pub fn from_log_moments(
    kernel: &Kernel,
    seq: &WeightSequence,
    log_moments: Vec<f64>,
    rel_errors: Vec<f64>,
    quad: &QuadConfig,
) -> Result<MomentKernel> {
    if log_moments.len() < 2 || log_moments.len() > seq.len() + 1 || rel_errors.len() != log_moments.len() {
        return Err(Error::Parameter(format!("{} moments do not fit the prefix", log_moments.len())));
    }
    let r = root_ratios(&log_moments, seq);
    let ln_b1 = r.iter().copied().fold(f64::INFINITY, f64::min);
    let ln_b2 = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MomentKernel { kernel: kernel.clone(), log_moments, rel_errors, ln_b1, ln_b2, quad: *quad })
}

/// `Σ a_p z^p` with `|a_p| ≤ C A^p M_p`, stored as `a_p / (A^p M_p)`.
#[derive(Clone, Debug)]
pub struct FormalSeries {
    normalized: Vec<Complex64>,
    ln_a: f64,
    seq: WeightSequence,
}

impl FormalSeries {
    pub fn from_coeffs(coeffs: &[Complex64], a: f64, seq: &WeightSequence) -> Result<Self> {
        let ln_a = check_type(a)?;
        check_len(coeffs.len(), seq)?;
        let normalized =
            coeffs.iter().enumerate().map(|(p, c)| c * exp(-(p as f64 * ln_a + seq.log_term(p)))).collect();
        Ok(Self { normalized, ln_a, seq: seq.clone() })
    }

    /// From `b_p = a_p / (A^p M_p)`.
    pub fn from_normalized(normalized: Vec<Complex64>, a: f64, seq: &WeightSequence) -> Result<Self> {
        let ln_a = check_type(a)?;
        check_len(normalized.len(), seq)?;
        Ok(Self { normalized, ln_a, seq: seq.clone() })
    }

    /// `a_p = (−1)^p M_p`, `p ≤ p_max`.
    pub fn alternating_mp(seq: &WeightSequence, a: f64, p_max: usize) -> Result<Self> {
        let ln_a = check_type(a)?;
        let b = (0..=p_max)
            .map(|p| {
                let s = if p % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(s * exp(-(p as f64) * ln_a), 0.0)
            })
            .collect();
        Self::from_normalized(b, a, seq)
    }

    pub fn zero(seq: &WeightSequence, a: f64, p_max: usize) -> Result<Self> {
        Self::from_normalized(alloc::vec![Complex64::new(0.0, 0.0); p_max + 1], a, seq)
    }

    pub fn len(&self) -> usize {
        self.normalized.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normalized.is_empty()
    }

    /// `A`.
    pub fn declared_type(&self) -> f64 {
        exp(self.ln_a)
    }

    pub fn seq(&self) -> &WeightSequence {
        &self.seq
    }

    pub fn normalized(&self, p: usize) -> Complex64 {
        self.normalized[p]
    }

    /// `ln(A^p M_p)`.
    pub fn log_scale(&self, p: usize) -> f64 {
        p as f64 * self.ln_a + self.seq.log_term(p)
    }

    pub fn coeff(&self, p: usize) -> Complex64 {
        self.normalized[p] * exp(self.log_scale(p))
    }

    /// `|f̂|_{M,A} = sup_p |a_p|/(A^p M_p)`.
    pub fn norm(&self) -> f64 {
        self.normalized.iter().fold(0.0, |m, b| m.max(b.norm()))
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        Self { normalized: self.normalized.iter().map(|b| b * k).collect(), ..self.clone() }
    }

    /// `α f̂ + β ĝ`; both must share `A` and the prefix.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        if self.ln_a != other.ln_a || self.seq.log_terms() != other.seq.log_terms() || self.len() != other.len() {
            return Err(Error::Parameter(String::from("series of different type or length")));
        }
        let normalized = self.normalized.iter().zip(&other.normalized).map(|(a, b)| a * alpha + b * beta).collect();
        Ok(Self { normalized, ..self.clone() })
    }

    /// `a_n z^n`.
    pub fn term(&self, n: usize, z: Polar) -> Complex64 {
        let b = self.normalized[n];
        if b.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let nf = n as f64;
        b * Complex64::from_polar(exp(self.log_scale(n) + nf * ln(z.r)), nf * z.theta)
    }
}

fn check_type(a: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Parameter(format!("series type A must be positive, got {a}")));
    }
    Ok(ln(a))
}

fn check_len(n: usize, seq: &WeightSequence) -> Result<()> {
    if n == 0 || n > seq.len() + 1 {
        return Err(Error::Parameter(format!("{n} coefficients do not fit a prefix of length {}", seq.len())));
    }
    Ok(())
}

pub fn series_norm(f: &FormalSeries) -> f64 {
    f.norm()
}

/// `ĝ_p = a_p / m(p)`, checked against `|ĝ_p| ≤ (|f̂|/m(0)) (A/B₁)^p`.
pub fn borel_transform(f: &FormalSeries, mk: &MomentKernel) -> Result<Vec<Complex64>> {
    if f.len() > mk.log_moments.len() {
        return Err(Error::InsufficientMoments { coeffs: f.len(), moments: mk.log_moments.len() });
    }
    let norm = f.norm();
    let mut out = Vec::with_capacity(f.len());
    for p in 0..f.len() {
        let lg = f.log_scale(p) - mk.log_moments[p];
        let g = f.normalized[p] * exp(lg);
        let bound = ln(norm) - mk.log_moments[0] + p as f64 * (f.ln_a - mk.ln_b1);
        if g.norm() > 0.0 && ln(g.norm()) > bound + 1e-9 * (1.0 + bound.abs()) {
            return Err(Error::Consistency(format!("Borel coefficient {p} exceeds its growth bound")));
        }
        out.push(g);
    }
    Ok(out)
}

/// Fits `|e(z)| ≤ C₁ e_ref(C₂|z|)` on `points`: for each `C₂` on a log grid
/// over `[1e-3, 1e3]` (13 per decade), `C₁` is the sup of the ratio; the
/// pair minimizing `C₁` is kept.
pub fn fit_kernel_bound(kernel: &Kernel, reference: &Kernel, points: &[Polar], name: &str) -> Result<FitReport> {
    let mut lg = Vec::with_capacity(points.len());
    for &z in points {
        lg.push((z.r, kernel.log_eval(z)?.re));
    }
    let mut best: Option<(f64, f64)> = None;
    let mut trajectory = Vec::new();
    for c2 in log_grid(1e-3, 1e3, 79) {
        let mut m = f64::NEG_INFINITY;
        for &(r, l) in &lg {
            m = m.max(l - reference.log_positive(c2 * r)?);
        }
        trajectory.push((c2, m));
        if m.is_finite() && best.is_none_or(|(_, b)| m < b) {
            best = Some((c2, m));
        }
    }
    let mut constants = BTreeMap::new();
    let (c2, ln_c1) = best.unwrap_or((f64::NAN, f64::INFINITY));
    constants.insert(String::from("C1"), exp(ln_c1));
    constants.insert(String::from("C2"), c2);
    let radii: Vec<f64> = points.iter().map(|z| z.r).collect();
    Ok(FitReport {
        name: String::from(name),
        constants,
        grid: GridDescriptor::of(&radii),
        trajectory,
        worst_margin: 0.0,
        pass: ln_c1.abs() <= 100.0,
        note: String::new(),
    })
}

/// Settings for [`ExtensionOperator`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExtendConfig {
    /// `abs_tol` is on `f(z)`; `rel_tol` on each integral.
    pub quad: QuadConfig,
    /// `R₀ = margin · B₁ / (2A)`.
    pub r0_margin: f64,
    /// Relative truncation level for the Borel series on `[0, R₀]`.
    pub g_tol: f64,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        Self { quad: QuadConfig::new(1e-9, 1e-10).with_max_subdivisions(50_000), r0_margin: 0.9, g_tol: 1e-12 }
    }
}

/// Which half of the moment integral was computed for one order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitSide {
    Lower,
    Upper,
}

/// `T_{M,A}(f̂)(z) = (1/z) ∫_0^{R₀} e(u/z) g(u) du` with `g` the truncated
/// Borel transform.
#[derive(Clone, Debug)]
pub struct ExtensionOperator {
    series: FormalSeries,
    kernel: Kernel,
    /// `ĝ_n R₀^n`, `n ≤ order`.
    scaled: Vec<Complex64>,
    r0: f64,
    cfg: ExtendConfig,
}

impl ExtensionOperator {
    pub fn new(f: &FormalSeries, mk: &MomentKernel, cfg: &ExtendConfig) -> Result<Self> {
        let g = borel_transform(f, mk)?;
        let a = f.declared_type();
        let r0 = cfg.r0_margin * mk.b1() / (2.0 * a);
        let rho = a * r0 / mk.b1();
        let scale = f.norm() / mk.moment(0);
        let mut order = g.len() - 1;
        if scale > 0.0 {
            let peak = (0..g.len()).fold(0.0, |m: f64, n| m.max(g[n].norm() * libm::pow(r0, n as f64)));
            for n in 0..g.len() {
                if scale * libm::pow(rho, (n + 1) as f64) / (1.0 - rho) <= cfg.g_tol * peak {
                    order = n;
                    break;
                }
            }
        }
        let scaled = (0..=order).map(|n| g[n] * libm::pow(r0, n as f64)).collect();
        Ok(Self { series: f.clone(), kernel: mk.kernel.clone(), scaled, r0, cfg: *cfg })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Truncation order of the Borel series.
    pub fn order(&self) -> usize {
        self.scaled.len() - 1
    }

    pub fn series(&self) -> &FormalSeries {
        &self.series
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    fn g_scaled(&self, t: f64) -> Complex64 {
        self.scaled.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
    }

    fn log_e(&self, r: f64, theta: f64) -> Result<Complex64> {
        if r == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        self.kernel.log_eval(Polar::new(r, theta))
    }

    /// `f(z)` by direct quadrature in `u = R₀ e^{−v}`.
    pub fn eval(&self, z: Polar) -> Result<QuadEstimate<Complex64>> {
        self.kernel.sector().contains(z).then_some(()).ok_or(Error::Sector {
            r: z.r,
            theta: z.theta,
            gamma: self.kernel.sector().opening_gamma(),
        })?;
        let scale = self.r0 / z.r;
        let quad = QuadConfig { abs_tol: self.cfg.quad.abs_tol / scale, ..self.cfg.quad };
        let est = integrate_log_tail(
            |v: f64| -> Result<Complex64> {
                let t = exp(-v);
                let e = self.log_e(scale * t, -z.theta)?.exp();
                Ok(e * self.g_scaled(t) * t)
            },
            0.0,
            &[],
            &quad,
        )?;
        let pre = Complex64::from_polar(scale, -z.theta);
        Ok(QuadEstimate { value: est.value * pre, abs_error: est.abs_error * scale, evaluations: est.evaluations })
    }

    /// Order-`n` contribution split at `|v| = R₀/|z|` along the ray through
    /// `R₀/z`: `lower_n + upper_n = a_n z^n`. The smaller half is integrated,
    /// the other follows from the identity.
    fn split(&self, n: usize, z: Polar) -> Result<(SplitSide, Complex64, f64)> {
        let c = self.scaled[n];
        if c.norm() == 0.0 {
            return Ok((SplitSide::Lower, Complex64::new(0.0, 0.0), 0.0));
        }
        let w = self.r0 / z.r;
        let k = (n + 1) as f64;
        let psi = |tau: f64| -> Result<Complex64> { Ok(self.log_e(w * exp(tau), -z.theta)? + k * tau) };
        let p0 = psi(0.0)?;
        let h = 1e-3;
        let side = if psi(h)?.re > psi(-h)?.re { SplitSide::Lower } else { SplitSide::Upper };
        let sign = if side == SplitSide::Lower { -1.0 } else { 1.0 };
        let quad = QuadConfig { abs_tol: 1e-16, ..self.cfg.quad };
        let est = integrate_log_tail(|v: f64| Ok((psi(sign * v)? - p0.re).exp()), 0.0, &[], &quad)?;
        let pre = c * Complex64::from_polar(exp(ln(w) + p0.re), -z.theta);
        Ok((side, pre * est.value, pre.norm() * est.abs_error))
    }

    /// `err_p(z) = f(z) − Σ_{n<p} a_n z^n` for `0 ≤ p ≤ p_max`, computed order
    /// by order so that no large partial sums cancel.
    pub fn remainders(&self, z: Polar, p_max: usize) -> Result<Vec<Complex64>> {
        if !self.kernel.sector().contains(z) {
            return Err(Error::Sector { r: z.r, theta: z.theta, gamma: self.kernel.sector().opening_gamma() });
        }
        if p_max >= self.series.len() {
            return Err(Error::Parameter(format!("order {p_max} exceeds the {} coefficients", self.series.len())));
        }
        let top = self.order().max(p_max);
        // lower_n and −upper_n for every n ≤ top
        let mut lower = Vec::with_capacity(top + 1);
        let mut neg_upper = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let a = self.series.term(n, z);
            if n > self.order() {
                lower.push(Complex64::new(0.0, 0.0));
                neg_upper.push(-a);
                continue;
            }
            let (side, s, _) = self.split(n, z)?;
            match side {
                SplitSide::Lower => {
                    lower.push(s);
                    neg_upper.push(s - a);
                }
                SplitSide::Upper => {
                    lower.push(a - s);
                    neg_upper.push(-s);
                }
            }
        }
        let mut out = Vec::with_capacity(p_max + 1);
        let mut below: Complex64 = Complex64::new(0.0, 0.0);
        let mut above: Vec<Complex64> = lower.clone();
        // suffix sums of lower
        for n in (0..top).rev() {
            above[n] = above[n] + above[n + 1];
        }
        for p in 0..=p_max {
            out.push(below + above[p]);
            below += neg_upper[p];
        }
        Ok(out)
    }
}

/// `T_{M,A}(f̂)(z)`.
pub fn extend(f: &FormalSeries, mk: &MomentKernel, z: Polar) -> Result<Complex64> {
    Ok(ExtensionOperator::new(f, mk, &ExtendConfig::default())?.eval(z)?.value)
}

/// Fitted `(C, c)` of `|err_p(z)| ≤ C (cA)^p M_p |z|^p`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticReport {
    pub c_const: f64,
    pub c: f64,
    /// `2K₄B₂/(K₂B₁)` when the flatness constants of the kernel are known.
    pub theoretical_c: Option<f64>,
    pub radii: GridDescriptor,
    pub grid_points: usize,
    /// `(p, sup_z err_p(z)/((cA)^p M_p |z|^p))`.
    pub worst_ratio: Vec<(usize, f64)>,
    pub pass: bool,
}

/// Error table `err[z][p]` for each grid point.
pub fn remainder_table(op: &ExtensionOperator, grid: &[Polar], p_max: usize) -> Result<Vec<Vec<Complex64>>> {
    grid.iter().map(|&z| op.remainders(z, p_max)).collect()
}

/// Fits `(C, c)` to `|err_p(z)|`.
///
/// With `L_p = max_z ln(err_p(z)/(A^p M_p |z|^p))`, the per-order constant is
/// `C_p(c) = exp(L_p − p ln c)`. `c` is the smallest value for which the sup
/// over orders is not attained only at `p_max`, i.e.
/// `ln c = min_{p<p_max} (L_{p_max} − L_p)/(p_max − p)`; `C = max_p C_p(c)`.
pub fn fit_asymptotics(
    series: &FormalSeries,
    mk: &MomentKernel,
    grid: &[Polar],
    table: &[Vec<Complex64>],
    p_max: usize,
    flat_report: Option<&FlatnessReport>,
) -> AsymptoticReport {
    let mut l = alloc::vec![f64::NEG_INFINITY; p_max + 1];
    let mut finite = true;
    for (z, row) in grid.iter().zip(table) {
        for p in 0..=p_max {
            let e = row[p].norm();
            if !e.is_finite() {
                finite = false;
            }
            if e > 0.0 {
                l[p] = l[p].max(ln(e) - series.log_scale(p) - p as f64 * ln(z.r));
            }
        }
    }
    let lm = l[p_max];
    let ln_c = if lm == f64::NEG_INFINITY || p_max == 0 {
        0.0
    } else {
        (0..p_max)
            .filter(|&p| l[p] > f64::NEG_INFINITY)
            .map(|p| (lm - l[p]) / (p_max - p) as f64)
            .fold(f64::INFINITY, f64::min)
    };
    let ln_c = if ln_c.is_finite() { ln_c } else { 0.0 };
    let worst_ratio: Vec<(usize, f64)> = (0..=p_max).map(|p| (p, exp(l[p] - p as f64 * ln_c))).collect();
    let c_const = worst_ratio.iter().fold(0.0, |m: f64, r| m.max(r.1));
    let theoretical_c = flat_report.map(|r| 2.0 * r.k4 * mk.b2() / (r.k2 * mk.b1()));
    let radii: Vec<f64> = grid.iter().map(|z| z.r).collect();
    AsymptoticReport {
        c_const,
        c: exp(ln_c),
        theoretical_c,
        radii: GridDescriptor::of(&radii),
        grid_points: grid.len(),
        worst_ratio,
        pass: finite && c_const.is_finite(),
    }
}

/// Remainders on `grid` and the fitted `(C, c)`.
pub fn verify_asymptotics(
    op: &ExtensionOperator,
    mk: &MomentKernel,
    grid: &[Polar],
    p_max: usize,
    flat_report: Option<&FlatnessReport>,
) -> Result<AsymptoticReport> {
    let table = remainder_table(op, grid, p_max)?;
    Ok(fit_asymptotics(op.series(), mk, grid, &table, p_max, flat_report))
}

/// Product grid of log-spaced radii and evenly spaced angles `|θ| ≤ theta_max`.
pub fn polar_grid(radii: &[f64], n_angles: usize, theta_max: f64) -> Vec<Polar> {
    let mut out = Vec::with_capacity(radii.len() * n_angles);
    for i in 0..n_angles {
        let t = if n_angles == 1 { 0.0 } else { -theta_max + 2.0 * theta_max * i as f64 / (n_angles - 1) as f64 };
        for &r in radii {
            out.push(Polar::new(r, t));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat::{flat_q_gevrey_s2, reference_exp};
    use crate::fmath::ln_factorial;
    use crate::weight_seq::{gevrey, q_gevrey};

    fn exp_kernel() -> Kernel {
        kernel_from_flat(&reference_exp(Sector::new(1.0).unwrap()))
    }

    #[test]
    fn exp_kernel_moments_are_factorials() {
        let seq = gevrey(1.0, 64).unwrap();
        let mk = moments(&exp_kernel(), &seq, 20, &moment_quad()).unwrap();
        for p in 0..=20 {
            let want = ln_factorial(p as f64);
            assert!((exp(mk.log_moment(p) - want) - 1.0).abs() < 1e-8, "p = {p}");
        }
        assert!((mk.b1() - 1.0).abs() < 1e-8 && (mk.b2() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn q_gevrey_kernel_band() {
        let seq = q_gevrey(2.0, 2.0, 64).unwrap();
        let k = kernel_from_flat(&flat_q_gevrey_s2(2.0, 2.0).unwrap());
        let mk = moments(&k, &seq, 25, &moment_quad()).unwrap();
        assert!(mk.b1() <= mk.b2());
        assert!(mk.b2() / mk.b1() < 50.0, "{} {}", mk.b1(), mk.b2());
        // coarse Riemann sum in ln t
        for p in [0usize, 3, 7] {
            let mut s = 0.0;
            let mut u = -30.0;
            while u < 80.0 {
                s += exp((p as f64 + 1.0) * u + k.log_positive(exp(u)).unwrap()) * 0.01;
                u += 0.01;
            }
            assert!((ln(s) - mk.log_moment(p)).abs() < 1e-4, "p = {p}");
        }
    }

    #[test]
    fn borel_of_alternating_factorials() {
        let seq = gevrey(1.0, 64).unwrap();
        let mk = moments(&exp_kernel(), &seq, 30, &moment_quad()).unwrap();
        let f = FormalSeries::alternating_mp(&seq, 1.0, 30).unwrap();
        assert_eq!(f.norm(), 1.0);
        let g = borel_transform(&f, &mk).unwrap();
        for (p, c) in g.iter().enumerate() {
            let s = if p % 2 == 0 { 1.0 } else { -1.0 };
            assert!((c.re - s).abs() < 1e-8 && c.im == 0.0);
        }
    }

    #[test]
    fn constant_series_tends_to_a0() {
        let seq = gevrey(1.0, 64).unwrap();
        let mk = moments(&exp_kernel(), &seq, 10, &moment_quad()).unwrap();
        let mut b = alloc::vec![Complex64::new(0.0, 0.0); 11];
        b[0] = Complex64::new(2.5, 0.0);
        let f = FormalSeries::from_normalized(b, 1.0, &seq).unwrap();
        let v = extend(&f, &mk, Polar::new(1e-4, 0.0)).unwrap();
        assert!((v.re - 2.5).abs() < 0.025 && v.im.abs() < 1e-12);
    }

    #[test]
    fn direct_and_split_routes_agree() {
        let seq = q_gevrey(2.0, 2.0, 64).unwrap();
        let k = kernel_from_flat(&flat_q_gevrey_s2(2.0, 2.0).unwrap());
        let mk = moments(&k, &seq, 40, &moment_quad()).unwrap();
        let f = FormalSeries::alternating_mp(&seq, 1.0, 40).unwrap();
        let op = ExtensionOperator::new(&f, &mk, &ExtendConfig::default()).unwrap();
        for z in [Polar::new(0.01, 0.3), Polar::new(0.2, -2.0), Polar::new(0.5, 2.8), Polar::new(1e-3, 0.0)] {
            let d = op.eval(z).unwrap().value;
            let s = op.remainders(z, 0).unwrap()[0];
            assert!((d - s).norm() < 1e-8 * (1.0 + d.norm()), "{z:?}: {d} vs {s}");
        }
    }

    #[test]
    fn linearity_and_zero_series() {
        let seq = gevrey(1.0, 64).unwrap();
        let mk = moments(&exp_kernel(), &seq, 20, &moment_quad()).unwrap();
        let f1 = FormalSeries::alternating_mp(&seq, 1.0, 20).unwrap();
        let b: Vec<Complex64> = (0..=20).map(|p| Complex64::new(1.0 / (p as f64 + 1.0), 0.5)).collect();
        let f2 = FormalSeries::from_normalized(b, 1.0, &seq).unwrap();
        let (a, c) = (Complex64::new(2.0, -1.0), Complex64::new(0.5, 0.0));
        let f3 = f1.combine(a, &f2, c).unwrap();
        let z = Polar::new(0.05, 0.4);
        let v1 = extend(&f1, &mk, z).unwrap();
        let v2 = extend(&f2, &mk, z).unwrap();
        let v3 = extend(&f3, &mk, z).unwrap();
        assert!((v3 - (v1 * a + v2 * c)).norm() < 1e-10 * (1.0 + v3.norm()));

        let zero = FormalSeries::zero(&seq, 1.0, 12).unwrap();
        let op = ExtensionOperator::new(&zero, &mk, &ExtendConfig::default()).unwrap();
        let grid = polar_grid(&log_grid(1e-3, 0.5, 5), 3, 0.7);
        let r = verify_asymptotics(&op, &mk, &grid, 12, None).unwrap();
        assert!(r.pass && r.c_const == 0.0);
    }

    #[test]
    fn euler_series_on_half_sector() {
        let seq = gevrey(1.0, 64).unwrap();
        let mk = moments(&exp_kernel(), &seq, 40, &moment_quad()).unwrap();
        let f = FormalSeries::alternating_mp(&seq, 1.0, 40).unwrap();
        let op = ExtensionOperator::new(&f, &mk, &ExtendConfig::default()).unwrap();
        let grid = polar_grid(&log_grid(1e-3, 0.4, 8), 5, 0.45 * core::f64::consts::FRAC_PI_2);
        let r = verify_asymptotics(&op, &mk, &grid, 12, None).unwrap();
        assert!(r.pass && r.c_const.is_finite() && r.c > 0.0, "{r:?}");
        let doubled = op_for(&f.scaled(Complex64::new(2.0, 0.0)), &mk);
        let r2 = verify_asymptotics(&doubled, &mk, &grid, 12, None).unwrap();
        assert!((r2.c_const / r.c_const - 2.0).abs() < 1e-9 && (r2.c - r.c).abs() < 1e-9 * r.c);
    }

    fn op_for(f: &FormalSeries, mk: &MomentKernel) -> ExtensionOperator {
        ExtensionOperator::new(f, mk, &ExtendConfig::default()).unwrap()
    }

    #[test]
    fn kernel_bounds_on_wide_sectors() {
        let e2 = kernel_from_flat(&flat_q_gevrey_s2(2.0, 2.0).unwrap());
        let e4 = kernel_from_flat(&crate::flat::flat_q_gevrey_sgamma(2.0, 2.0, 4.0).unwrap());
        let pts2 = polar_grid(&log_grid(1e-3, 1e3, 25), 11, 0.95 * core::f64::consts::PI);
        let r = fit_kernel_bound(&e2, &e2, &pts2, "e2").unwrap();
        assert!(r.pass, "{r:?}");
        let pts4 = polar_grid(&log_grid(1e-3, 1e3, 25), 11, 0.95 * 2.0 * core::f64::consts::PI);
        let r = fit_kernel_bound(&e4, &e2, &pts4, "e4").unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn sector_and_moment_errors() {
        let seq = gevrey(1.0, 16).unwrap();
        let mk = moments(&exp_kernel(), &seq, 10, &moment_quad()).unwrap();
        let f = FormalSeries::alternating_mp(&seq, 1.0, 12).unwrap();
        assert!(matches!(borel_transform(&f, &mk), Err(Error::InsufficientMoments { .. })));
        let f = FormalSeries::alternating_mp(&seq, 1.0, 8).unwrap();
        let op = op_for(&f, &mk);
        assert!(matches!(op.eval(Polar::new(0.1, 2.0)), Err(Error::Sector { .. })));
    }
}
