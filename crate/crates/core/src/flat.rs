//! Optimal flat functions on sectors of the Riemann surface of the logarithm
//! and the constant fit that certifies flatness on a grid.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::assoc::{q_gevrey_b, AssociatedFunctions, Omega};
use crate::error::{Error, Result};
use crate::fmath::{cos, exp, ln, ln1p, log_grid, powf, sin, sqrt};
use crate::harmonic::{harmonic_quad, require_tail, HarmonicEvaluator};
use crate::quad::QuadConfig;
use crate::report::{FitReport, GridDescriptor};
use crate::weight_seq::{gamma_estimate, power, WeightSequence};

/// A point `r e^{iθ}` of the Riemann surface; `θ` is not reduced mod `2π`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polar {
    pub r: f64,
    pub theta: f64,
}

impl Polar {
    pub fn new(r: f64, theta: f64) -> Self {
        Self { r, theta }
    }

    /// `z^a = (r^a, aθ)`.
    pub fn powf(self, a: f64) -> Self {
        Self { r: powf(self.r, a), theta: a * self.theta }
    }

    /// `1/z = (1/r, −θ)`.
    pub fn recip(self) -> Self {
        Self { r: 1.0 / self.r, theta: -self.theta }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.r * cos(self.theta), self.r * sin(self.theta))
    }
}

/// `S_γ = {z : |arg z| < γπ/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sector {
    opening_gamma: f64,
}

impl Sector {
    pub fn new(opening_gamma: f64) -> Result<Self> {
        if !(opening_gamma > 0.0 && opening_gamma.is_finite()) {
            return Err(Error::Parameter(format!("sector opening must be positive, got {opening_gamma}")));
        }
        Ok(Self { opening_gamma })
    }

    pub fn opening_gamma(&self) -> f64 {
        self.opening_gamma
    }

    /// `γπ/2`.
    pub fn half_opening(&self) -> f64 {
        self.opening_gamma * FRAC_PI_2
    }

    pub fn contains(&self, z: Polar) -> bool {
        z.r > 0.0 && z.theta.abs() < self.half_opening()
    }

    fn check(&self, z: Polar) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::Sector { r: z.r, theta: z.theta, gamma: self.opening_gamma })
        }
    }
}

/// How a [`FlatFunction`] was built.
#[derive(Clone, Debug)]
pub enum FlatKind {
    /// `exp(−P_ω(i/z) − iQ_ω(i/z))` on `S_1`.
    Harmonic {
        seq: Arc<WeightSequence>,
        quad: QuadConfig,
    },
    /// `(G(z^s))^{1/s}`.
    Ramified {
        inner: Box<FlatFunction>,
        s: f64,
    },
    /// `exp(−b_{q,s} log^s(1 + 1/z))` on `S_2`.
    QGevreyS2 {
        q: f64,
        sigma: f64,
    },
    /// `(G_2(z^{2/γ}))^{(γ/2)^s}` on `S_γ`.
    QGevreySgamma {
        q: f64,
        sigma: f64,
        gamma: f64,
    },
    Product(Box<FlatFunction>, Box<FlatFunction>),
    /// `e^{−1/z}`.
    ReferenceExp,
    One,
}

/// A holomorphic function on a sector, evaluated through its logarithm.
#[derive(Clone, Debug)]
pub struct FlatFunction {
    sector: Sector,
    kind: FlatKind,
}

impl FlatFunction {
    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn kind(&self) -> &FlatKind {
        &self.kind
    }

    /// A continuous branch of `log F(z)`.
    pub fn log_eval(&self, z: Polar) -> Result<Complex64> {
        self.sector.check(z)?;
        match &self.kind {
            FlatKind::Harmonic { seq, quad } => {
                // w = i/z has modulus 1/r and argument π/2 − θ
                let (x, y) = (sin(z.theta) / z.r, cos(z.theta) / z.r);
                let ev = HarmonicEvaluator::new(Omega(seq), *quad);
                let p = ev.poisson(x, y)?.value;
                let q = ev.conjugate(x, y)?.value;
                Ok(Complex64::new(-p, -q))
            }
            FlatKind::Ramified { inner, s } => Ok(inner.log_eval(z.powf(*s))? / *s),
            FlatKind::QGevreyS2 { q, sigma } => Ok(log_g2(*q, *sigma, z)),
            FlatKind::QGevreySgamma { q, sigma, gamma } => {
                let s = sigma / (sigma - 1.0);
                Ok(log_g2(*q, *sigma, z.powf(2.0 / gamma)) * powf(gamma / 2.0, s))
            }
            FlatKind::Product(a, b) => Ok(a.log_eval(z)? + b.log_eval(z)?),
            FlatKind::ReferenceExp => {
                let w = z.recip();
                Ok(-Complex64::new(w.r * cos(w.theta), w.r * sin(w.theta)))
            }
            FlatKind::One => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn eval(&self, z: Polar) -> Result<Complex64> {
        Ok(self.log_eval(z)?.exp())
    }

    /// `F(x)` for `x > 0` (real and positive).
    pub fn eval_positive_axis(&self, x: f64) -> Result<f64> {
        Ok(exp(self.log_eval(Polar::new(x, 0.0))?.re))
    }

    /// `ln F(x)` for `x > 0`.
    pub fn log_positive_axis(&self, x: f64) -> Result<f64> {
        Ok(self.log_eval(Polar::new(x, 0.0))?.re)
    }
}

/// `Log(1+w)` accurate for small `|w|`.
fn clog1p(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        let re = 0.5 * ln1p(2.0 * w.re + w.norm_sqr());
        Complex64::new(re, libm::atan2(w.im, 1.0 + w.re))
    } else {
        (Complex64::new(1.0, 0.0) + w).ln()
    }
}

/// `log G_2 = −b_{q,s} (Log(1 + 1/z))^s`, principal branches.
fn log_g2(q: f64, sigma: f64, z: Polar) -> Complex64 {
    let s = sigma / (sigma - 1.0);
    let b = q_gevrey_b(q, s);
    let w = z.recip();
    let l = clog1p(Complex64::new(w.r * cos(w.theta), w.r * sin(w.theta)));
    if l.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    -(l.ln() * s).exp() * b
}

/// Options for the harmonic construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatOptions {
    /// Caller-asserted growth index; estimated from the prefix when absent.
    pub gamma_hint: Option<f64>,
    pub quad: QuadConfig,
}

impl Default for FlatOptions {
    fn default() -> Self {
        Self { gamma_hint: None, quad: harmonic_quad() }
    }
}

fn growth_index(seq: &WeightSequence, hint: Option<f64>) -> f64 {
    hint.unwrap_or_else(|| gamma_estimate(seq).value())
}

/// `G(z) = exp(−P_ω(i/z) − iQ_ω(i/z))` on `S_1`.
pub fn flat_halfplane(seq: &WeightSequence) -> Result<FlatFunction> {
    flat_halfplane_with(seq, &FlatOptions::default())
}

pub fn flat_halfplane_with(seq: &WeightSequence, opts: &FlatOptions) -> Result<FlatFunction> {
    require_tail(seq)?;
    let g = growth_index(seq, opts.gamma_hint);
    if !(g > 1.0) {
        return Err(Error::Precondition(format!("{}: growth index {g} must exceed 1", seq.label())));
    }
    Ok(FlatFunction {
        sector: Sector::new(1.0)?,
        kind: FlatKind::Harmonic { seq: Arc::new(seq.clone()), quad: opts.quad },
    })
}

/// Default ramification exponent: `s = 2/(γ + min(γ(M), γ + 2))`, the
/// midpoint of `(γ, γ(M))` in reciprocal space.
pub fn default_ramification(gamma: f64, gamma_m: f64) -> f64 {
    2.0 / (gamma + gamma_m.min(gamma + 2.0))
}

/// `F(z) = (G(z^s))^{1/s}` on `S_γ`, with `G` built for `M^s` on `S_1`.
pub fn flat_ramified(seq: &WeightSequence, gamma: f64, s: Option<f64>) -> Result<FlatFunction> {
    flat_ramified_with(seq, gamma, s, &FlatOptions::default())
}

pub fn flat_ramified_with(
    seq: &WeightSequence,
    gamma: f64,
    s: Option<f64>,
    opts: &FlatOptions,
) -> Result<FlatFunction> {
    let sector = Sector::new(gamma)?;
    let gamma_m = growth_index(seq, opts.gamma_hint);
    if !(gamma < gamma_m) {
        return Err(Error::Precondition(format!(
            "{}: opening {gamma} must be below the growth index {gamma_m}",
            seq.label()
        )));
    }
    let s = s.unwrap_or_else(|| default_ramification(gamma, gamma_m));
    if !(s > 0.0 && gamma < 1.0 / s && 1.0 / s < gamma_m) {
        return Err(Error::Parameter(format!("ramification s = {s} needs {gamma} < 1/s < {gamma_m}")));
    }
    let inner_opts = FlatOptions { gamma_hint: Some(gamma_m * s), quad: opts.quad };
    let powered = power(seq, s)?;
    check_power_omega(seq, &powered, s)?;
    let inner = flat_halfplane_with(&powered, &inner_opts)?;
    Ok(FlatFunction { sector, kind: FlatKind::Ramified { inner: Box::new(inner), s } })
}

/// `ω_M(t^{1/s}) = (1/s) ω_{M^s}(t)` on a grid inside the prefix.
fn check_power_omega(seq: &WeightSequence, powered: &WeightSequence, s: f64) -> Result<()> {
    let (a, b) = (AssociatedFunctions::new(seq), AssociatedFunctions::new(powered));
    let hi = powered.domain_limit().min(1e300);
    for t in log_grid(1.0, hi.max(2.0), 16) {
        let (l, r) = (a.omega(powf(t, 1.0 / s))?, b.omega(t)? / s);
        if (l - r).abs() > 1e-9 * (1.0 + l.abs()) {
            return Err(Error::Consistency(format!("omega of the power disagrees at t = {t}: {l} vs {r}")));
        }
    }
    Ok(())
}

fn check_q_gevrey(q: f64, sigma: f64) -> Result<()> {
    if !(q > 1.0 && q.is_finite()) || !(sigma > 1.0 && sigma <= 2.0) {
        return Err(Error::Parameter(format!("need q > 1 and sigma in (1, 2], got ({q}, {sigma})")));
    }
    Ok(())
}

/// `G_2(z) = exp(−b_{q,s} log^s(1 + 1/z))` on `S_2`, `s = σ/(σ−1)`.
pub fn flat_q_gevrey_s2(q: f64, sigma: f64) -> Result<FlatFunction> {
    check_q_gevrey(q, sigma)?;
    Ok(FlatFunction { sector: Sector::new(2.0)?, kind: FlatKind::QGevreyS2 { q, sigma } })
}

/// `G_γ(z) = (G_2(z^{2/γ}))^{(γ/2)^s}` on `S_γ`, `γ ≥ 2`.
pub fn flat_q_gevrey_sgamma(q: f64, sigma: f64, gamma: f64) -> Result<FlatFunction> {
    check_q_gevrey(q, sigma)?;
    if !(gamma >= 2.0 && gamma.is_finite()) {
        return Err(Error::Parameter(format!("opening must be at least 2, got {gamma}")));
    }
    Ok(FlatFunction { sector: Sector::new(gamma)?, kind: FlatKind::QGevreySgamma { q, sigma, gamma } })
}

/// Pointwise product, flat for the convolved sequence.
pub fn flat_product(a: &FlatFunction, b: &FlatFunction) -> Result<FlatFunction> {
    let (ga, gb) = (a.sector.opening_gamma, b.sector.opening_gamma);
    if (ga - gb).abs() > 1e-12 * ga.max(gb) {
        return Err(Error::SectorMismatch(ga, gb));
    }
    Ok(FlatFunction { sector: a.sector, kind: FlatKind::Product(Box::new(a.clone()), Box::new(b.clone())) })
}

/// `e^{−1/z}` on the given sector.
pub fn reference_exp(sector: Sector) -> FlatFunction {
    FlatFunction { sector, kind: FlatKind::ReferenceExp }
}

/// The constant function 1.
pub fn one(sector: Sector) -> FlatFunction {
    FlatFunction { sector, kind: FlatKind::One }
}

/// Sampling grid for [`verify_flatness`].
///
/// Fit points are `x` on the positive axis and `x × angles` in the sector,
/// where `angles` are fractions of the half-opening. Validation points are
/// the geometric midpoints of consecutive `x` and the midpoints of
/// consecutive angles; margins are reported over both.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessGrid {
    pub x: Vec<f64>,
    pub angles: Vec<f64>,
}

impl FlatnessGrid {
    /// `x` log-spaced on `[1e-6, 10]` (60 points) and 21 angles in
    /// `[−0.95, 0.95]` of the half-opening.
    pub fn standard() -> Self {
        Self::new(log_grid(1e-6, 10.0, 60), 21, 0.95)
    }

    pub fn new(x: Vec<f64>, n_angles: usize, coverage: f64) -> Self {
        let angles = if n_angles <= 1 {
            alloc::vec![0.0]
        } else {
            (0..n_angles).map(|i| coverage * (-1.0 + 2.0 * i as f64 / (n_angles - 1) as f64)).collect()
        };
        Self { x, angles }
    }

    pub fn coverage(&self) -> f64 {
        self.angles.iter().fold(0.0, |m: f64, a| m.max(a.abs()))
    }

    fn x_validation(&self) -> Vec<f64> {
        self.x.windows(2).map(|w| sqrt(w[0] * w[1])).collect()
    }

    fn angle_validation(&self) -> Vec<f64> {
        self.angles.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Positive-axis points: fit points first, then validation points.
    pub fn axis_points(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend(self.x_validation());
        v
    }

    /// Sector points for a sector of the given half-opening.
    pub fn sector_points(&self, sector: Sector) -> Vec<Polar> {
        let h = sector.half_opening();
        let mut v = Vec::with_capacity(self.x.len() * self.angles.len() * 2);
        for &a in &self.angles {
            for &r in &self.x {
                v.push(Polar::new(r, a * h));
            }
        }
        for &a in &self.angle_validation() {
            for &r in &self.x_validation() {
                v.push(Polar::new(r, a * h));
            }
        }
        v
    }

    fn fit_counts(&self) -> (usize, usize) {
        (self.x.len(), self.x.len() * self.angles.len())
    }
}

/// Search settings for the flatness constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatnessConfig {
    pub k_lo: f64,
    pub k_hi: f64,
    pub per_decade: usize,
    /// Multiplicative slack applied to `K₃` (and divided out of `K₁`) after
    /// the fit, so that validation points between grid nodes are covered.
    pub safety: f64,
    /// Largest admissible `|ln K₁|`, `|ln K₃|`.
    pub max_log_constant: f64,
}

impl Default for FlatnessConfig {
    fn default() -> Self {
        Self { k_lo: 1e-3, k_hi: 1e3, per_decade: 13, safety: 1.1, max_log_constant: 100.0 }
    }
}

/// `ln |F|` on the axis and sector points of a [`FlatnessGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessSamples {
    pub axis: Vec<(f64, f64)>,
    pub sector: Vec<(Polar, f64)>,
}

/// Evaluates `F` on a grid, sequentially.
pub fn sample_flatness(f: &FlatFunction, grid: &FlatnessGrid) -> Result<FlatnessSamples> {
    let axis = grid.axis_points().into_iter().map(|x| Ok((x, f.log_positive_axis(x)?))).collect::<Result<_>>()?;
    let sector =
        grid.sector_points(f.sector()).into_iter().map(|z| Ok((z, f.log_eval(z)?.re))).collect::<Result<_>>()?;
    Ok(FlatnessSamples { axis, sector })
}

/// Fitted constants of `K₁ h(K₂x) ≤ G(x)` and `|G(z)| ≤ K₃ h(K₄|z|)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlatnessReport {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub ln_k1: f64,
    pub ln_k3: f64,
    pub x_grid: GridDescriptor,
    /// Largest sampled `|θ|` as a fraction of the half-opening.
    pub angular_coverage: f64,
    pub sector_points: usize,
    pub worst_margin_lower: f64,
    pub worst_margin_upper: f64,
    pub pass: bool,
    /// Set when `h` could not be evaluated somewhere; names the point.
    pub inconclusive: Option<String>,
}

impl FlatnessReport {
    pub fn to_fit_report(&self, name: &str) -> FitReport {
        let mut constants = BTreeMap::new();
        for (k, v) in [("K1", self.k1), ("K2", self.k2), ("K3", self.k3), ("K4", self.k4)] {
            constants.insert(String::from(k), v);
        }
        FitReport {
            name: String::from(name),
            constants,
            grid: self.x_grid.clone(),
            trajectory: Vec::new(),
            worst_margin: self.worst_margin_lower.min(self.worst_margin_upper),
            pass: self.pass,
            note: self.inconclusive.clone().unwrap_or_default(),
        }
    }
}

/// Constants bounding a product of two flat functions against the convolved
/// sequence: `K₃J₃`, `max(K₄, J₄)`, `K₁J₁`, `min(K₂, J₂)`.
pub fn combine_product_constants(a: &FlatnessReport, b: &FlatnessReport) -> [f64; 4] {
    [a.k1 * b.k1, a.k2.min(b.k2), a.k3 * b.k3, a.k4.max(b.k4)]
}

/// Samples `F` and fits its flatness constants against `seq`.
pub fn verify_flatness(
    f: &FlatFunction,
    seq: &WeightSequence,
    grid: &FlatnessGrid,
    cfg: &FlatnessConfig,
) -> Result<FlatnessReport> {
    let samples = sample_flatness(f, grid)?;
    Ok(fit_flatness(&samples, seq, grid, cfg))
}

/// `ln h(K r) = −ω(1/(K r))`; `Err` carries the offending point.
fn ln_h(af: &AssociatedFunctions<'_>, k: f64, r: f64) -> core::result::Result<f64, f64> {
    af.ln_h(k * r).map_err(|_| r)
}

/// Fits `K₁..K₄` to precomputed samples.
///
/// Upper bound: for each `K₄` candidate `ln K₃ = max (ln|G| − ln h(K₄ r))`
/// over the sector fit points; the candidate minimizing `K₃` is kept. Lower
/// bound: for each `K₂` candidate `ln K₁ = min (ln G − ln h(K₂ x))` over the
/// axis fit points; `K₁` grows without bound as `K₂ → 0`, so the candidate
/// with the largest `K₁ ≤ 1` is kept. Both searches are refined once on a
/// finer grid around the best candidate.
pub fn fit_flatness(
    samples: &FlatnessSamples,
    seq: &WeightSequence,
    grid: &FlatnessGrid,
    cfg: &FlatnessConfig,
) -> FlatnessReport {
    let af = AssociatedFunctions::new(seq);
    let (n_axis_fit, n_sector_fit) = grid.fit_counts();
    let axis_fit = &samples.axis[..n_axis_fit];
    let sector_fit = &samples.sector[..n_sector_fit];
    let decades = libm::log10(cfg.k_hi / cfg.k_lo);
    let candidates = log_grid(cfg.k_lo, cfg.k_hi, (decades * cfg.per_decade as f64) as usize + 1);
    let mut offending: Option<f64> = None;

    let upper = |k: f64| -> core::result::Result<f64, f64> {
        let mut m = f64::NEG_INFINITY;
        for (z, lg) in sector_fit {
            m = m.max(lg - ln_h(&af, k, z.r)?);
        }
        Ok(m)
    };
    let lower = |k: f64| -> core::result::Result<f64, f64> {
        let mut m = f64::INFINITY;
        for (x, lg) in axis_fit {
            m = m.min(lg - ln_h(&af, k, *x)?);
        }
        Ok(m)
    };

    let best_upper = search(&candidates, &upper, |a, b| a < b, &mut offending);
    let best_lower = search(&candidates, &lower, |a, b| a <= 0.0 && (b > 0.0 || a > b), &mut offending);

    let ln_safety = ln(cfg.safety);
    let (k4, ln_k3) = best_upper.map(|(k, v)| (k, v + ln_safety)).unwrap_or((f64::NAN, f64::INFINITY));
    let (k2, ln_k1) = best_lower.map(|(k, v)| (k, v - ln_safety)).unwrap_or((f64::NAN, f64::NEG_INFINITY));

    let mut worst_upper = f64::INFINITY;
    let mut worst_lower = f64::INFINITY;
    if best_upper.is_some() {
        for (z, lg) in &samples.sector {
            match ln_h(&af, k4, z.r) {
                Ok(lh) => worst_upper = worst_upper.min(ln_k3 + lh - lg),
                Err(r) => {
                    offending.get_or_insert(r);
                }
            }
        }
    } else {
        worst_upper = f64::NEG_INFINITY;
    }
    if best_lower.is_some() {
        for (x, lg) in &samples.axis {
            match ln_h(&af, k2, *x) {
                Ok(lh) => worst_lower = worst_lower.min(lg - ln_k1 - lh),
                Err(r) => {
                    offending.get_or_insert(r);
                }
            }
        }
    } else {
        worst_lower = f64::NEG_INFINITY;
    }
    let inconclusive = offending.map(|r| format!("h not evaluable at K*r with r = {r} (outside the domain of omega)"));
    let bounded = ln_k3.abs() <= cfg.max_log_constant && ln_k1.abs() <= cfg.max_log_constant;
    let pass = inconclusive.is_none() && bounded && worst_upper >= 0.0 && worst_lower >= 0.0;
    FlatnessReport {
        k1: exp(ln_k1),
        k2,
        k3: exp(ln_k3),
        k4,
        ln_k1,
        ln_k3,
        x_grid: GridDescriptor::of(&grid.x),
        angular_coverage: grid.coverage(),
        sector_points: samples.sector.len(),
        worst_margin_lower: worst_lower,
        worst_margin_upper: worst_upper,
        pass,
        inconclusive,
    }
}

/// Coarse search over `candidates` then one refinement between the
/// neighbours of the best one. `better(a, b)` says value `a` beats `b`.
fn search(
    candidates: &[f64],
    objective: &dyn Fn(f64) -> core::result::Result<f64, f64>,
    better: impl Fn(f64, f64) -> bool,
    offending: &mut Option<f64>,
) -> Option<(f64, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &k) in candidates.iter().enumerate() {
        match objective(k) {
            Ok(v) if v.is_finite() => {
                if best.is_none_or(|(_, b)| better(v, b)) {
                    best = Some((i, v));
                }
            }
            Ok(_) => {}
            Err(r) => {
                offending.get_or_insert(r);
            }
        }
    }
    let (i, v) = best?;
    let lo = candidates[i.saturating_sub(1)];
    let hi = candidates[(i + 1).min(candidates.len() - 1)];
    let mut out = (candidates[i], v);
    if hi > lo {
        for k in log_grid(lo, hi, 13) {
            if let Ok(w) = objective(k) {
                if w.is_finite() && better(w, out.1) {
                    out = (k, w);
                }
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight_seq::{gevrey, q_gevrey};

    #[test]
    fn g2_reference_value() {
        let f = flat_q_gevrey_s2(core::f64::consts::E, 2.0).unwrap();
        let v = f.eval_positive_axis(1.0).unwrap();
        let l2 = ln(2.0);
        assert!((v - exp(-0.25 * l2 * l2)).abs() < 1e-15);
        assert!((v - 0.886_820).abs() < 1e-6);
        assert!((f.eval_positive_axis(1e8).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sector_errors() {
        let f = flat_q_gevrey_s2(2.0, 2.0).unwrap();
        assert!(matches!(f.eval(Polar::new(1.0, 3.2)), Err(Error::Sector { .. })));
        assert!(f.eval(Polar::new(1.0, 3.1)).is_ok());
    }

    #[test]
    fn sgamma_two_is_s2() {
        let a = flat_q_gevrey_s2(2.0, 1.5).unwrap();
        let b = flat_q_gevrey_sgamma(2.0, 1.5, 2.0).unwrap();
        for &(r, t) in &[(0.1, 0.3), (2.0, -2.5), (1e-4, 1.0)] {
            let z = Polar::new(r, t);
            assert!((a.log_eval(z).unwrap() - b.log_eval(z).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let fs = [
            flat_q_gevrey_s2(2.0, 2.0).unwrap(),
            flat_q_gevrey_sgamma(2.0, 2.0, 4.0).unwrap(),
            flat_halfplane(&gevrey(2.0, 128).unwrap()).unwrap(),
        ];
        for f in &fs {
            for &(r, t) in &[(0.5, 0.4), (0.05, 1.2), (3.0, -0.7)] {
                let a = f.eval(Polar::new(r, t)).unwrap();
                let b = f.eval(Polar::new(r, -t)).unwrap();
                assert!((a - b.conj()).norm() <= 1e-10 * a.norm().max(1e-300));
            }
            let x = f.eval(Polar::new(0.3, 0.0)).unwrap();
            assert!(x.im.abs() <= 1e-15 * x.re && x.re > 0.0);
        }
    }

    #[test]
    fn product_of_g2_copies_matches_doubled_b() {
        let (q, sigma) = (2.0, 1.5);
        let s = sigma / (sigma - 1.0);
        let g = flat_q_gevrey_s2(q, sigma).unwrap();
        let p = flat_product(&g, &g).unwrap();
        let q2 = powf(q, powf(2.0, 1.0 - sigma));
        assert!((q_gevrey_b(q2, s) - 2.0 * q_gevrey_b(q, s)).abs() < 1e-14);
        let g2 = flat_q_gevrey_s2(q2, sigma).unwrap();
        for &(r, t) in &[(0.1, 0.3), (2.0, -2.5)] {
            let z = Polar::new(r, t);
            assert!((p.log_eval(z).unwrap() - g2.log_eval(z).unwrap()).norm() < 1e-12);
        }
        let with_one = flat_product(&g, &one(g.sector())).unwrap();
        let z = Polar::new(0.2, 0.5);
        assert_eq!(with_one.eval(z).unwrap(), g.eval(z).unwrap());
        assert!(matches!(flat_product(&g, &reference_exp(Sector::new(1.0).unwrap())), Err(Error::SectorMismatch(..))));
    }

    #[test]
    fn ramified_with_unit_exponent_is_halfplane() {
        let seq = gevrey(2.0, 128).unwrap();
        let f = flat_ramified(&seq, 0.8, Some(1.0)).unwrap();
        let g = flat_halfplane(&seq).unwrap();
        let z = Polar::new(0.3, 0.5);
        assert_eq!(f.eval(z).unwrap(), g.eval(z).unwrap());
        assert!(matches!(flat_ramified(&seq, 1.5, Some(1.0)), Err(Error::Parameter(_))));
        assert!(matches!(flat_ramified(&seq, 2.5, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn halfplane_preconditions() {
        assert!(matches!(flat_halfplane(&gevrey(0.8, 256).unwrap()), Err(Error::Precondition(_))));
        let custom = crate::weight_seq::m_alpha_beta(2.0, 1.0, 64).unwrap();
        assert!(matches!(flat_halfplane(&custom), Err(Error::Precondition(_))));
    }

    #[test]
    fn q_gevrey_flatness_passes() {
        let f = flat_q_gevrey_s2(2.0, 2.0).unwrap();
        let seq = q_gevrey(2.0, 2.0, 256).unwrap();
        let r = verify_flatness(&f, &seq, &FlatnessGrid::standard(), &FlatnessConfig::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn reference_exp_gevrey_one() {
        let seq = gevrey(1.0, 256).unwrap();
        let f = reference_exp(Sector::new(0.5).unwrap());
        let r = verify_flatness(&f, &seq, &FlatnessGrid::standard(), &FlatnessConfig::default()).unwrap();
        assert!(r.pass, "{r:?}");
        // on S_1 with angles approaching the boundary rays the upper fit breaks down
        let f1 = reference_exp(Sector::new(1.0).unwrap());
        let grid = FlatnessGrid::new(log_grid(1e-6, 10.0, 60), 21, 0.99999);
        let r = verify_flatness(&f1, &seq, &grid, &FlatnessConfig::default()).unwrap();
        assert!(!r.pass, "{r:?}");
    }
}
