//! Poisson extension `P_σ` of `σ(|t|)` to the upper half-plane, its harmonic
//! conjugate `Q_σ`, and the Langenbruch fit.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_PI;

use crate::assoc::{AssociatedFunctions, Omega, Weight};
use crate::error::{Error, Result};
use crate::fmath::{atan, cos, exp, ln, log_grid, tan};
use crate::quad::{integrate, integrate_log_tail, QuadConfig, QuadEstimate};
use crate::report::{FitReport, GridDescriptor};
use crate::weight_seq::{check_property, check_seq, Property, Verdict, WeightSequence};

/// The real line is split at `±T` with `T = TAIL_FACTOR · (|x| + |y|)`;
/// the central part is integrated in the angle variable, the rest in `ln t`.
const TAIL_FACTOR: f64 = 32.0;
const KNOT_LIMIT: usize = 128;

/// Evaluates `P_σ` and `Q_σ` for one boundary function `σ`.
#[derive(Clone, Debug)]
pub struct HarmonicEvaluator<W> {
    sigma: W,
    quad: QuadConfig,
}

impl<W: Weight> HarmonicEvaluator<W> {
    pub fn new(sigma: W, quad: QuadConfig) -> Self {
        Self { sigma, quad }
    }

    pub fn sigma(&self) -> &W {
        &self.sigma
    }

    pub fn quad(&self) -> &QuadConfig {
        &self.quad
    }

    fn split(&self, x: f64, y: f64) -> f64 {
        TAIL_FACTOR * (x + y)
    }

    /// `P_σ(x+iy) = (|y|/π) ∫ σ(|t|) / ((t−x)² + y²) dt`; equals `σ(|x|)` on
    /// the real axis.
    pub fn poisson(&self, x: f64, y: f64) -> Result<QuadEstimate<f64>> {
        let (ax, ay) = (x.abs(), y.abs());
        if ay == 0.0 {
            return Ok(QuadEstimate { value: self.sigma.eval(ax)?, abs_error: 0.0, evaluations: 1 });
        }
        let big_t = self.split(ax, ay);
        // t = ax + ay tanθ turns the kernel into dθ/π
        let theta = |t: f64| atan((t - ax) / ay);
        let (th_lo, th_hi) = (theta(-big_t), theta(big_t));
        let mut breaks = alloc::vec![theta(0.0)];
        for k in self.sigma.knots(0.0, big_t, KNOT_LIMIT) {
            breaks.push(theta(k));
            breaks.push(theta(-k));
        }
        let inner = integrate(
            |th: f64| Ok(self.sigma.eval((ax + ay * tan(th)).abs())? * FRAC_1_PI),
            th_lo,
            th_hi,
            &breaks,
            &self.quad,
        )?;
        let tail = self.tail(big_t, |t| {
            let k = 1.0 / ((t - ax) * (t - ax) + ay * ay) + 1.0 / ((t + ax) * (t + ax) + ay * ay);
            ay * FRAC_1_PI * k
        })?;
        Ok(combine(inner, tail))
    }

    /// `Q_σ(x+iy) = (1/π) ∫ [(x−t)/((x−t)²+y²) + t/(1+t²)] σ(|t|) dt` for
    /// `y > 0`, normalized so that `Q_σ(iy) = 0`.
    ///
    /// Folding `t ↦ −t` cancels the `t/(1+t²)` term and leaves
    /// `(1/π) ∫_0^∞ σ(t) [g(|x|+t) − g(t−|x|)] dt · sign(x)` with
    /// `g(a) = a/(a²+y²)`.
    pub fn conjugate(&self, x: f64, y: f64) -> Result<QuadEstimate<f64>> {
        if !(y > 0.0) {
            return Err(Error::Parameter(format!("conjugate needs y > 0, got {y}")));
        }
        if x == 0.0 {
            return Ok(QuadEstimate { value: 0.0, abs_error: 0.0, evaluations: 0 });
        }
        let (ax, sign) = (x.abs(), x.signum());
        let big_t = self.split(ax, y);
        let theta = |t: f64| atan((t - ax) / y);
        let (th_lo, th_hi) = (theta(0.0), theta(big_t));
        let mut breaks = alloc::vec![0.0];
        for k in self.sigma.knots(0.0, big_t, KNOT_LIMIT) {
            breaks.push(theta(k));
        }
        let inner = integrate(
            |th: f64| {
                let (tn, c) = (tan(th), cos(th));
                let t = ax + y * tn;
                let s = ax + t;
                // g(ax+t) dt/dθ − g(t−ax) dt/dθ, the latter being tanθ
                let direct = s / (s * s + y * y) * y / (c * c);
                Ok(self.sigma.eval(t)? * FRAC_1_PI * (direct - tn))
            },
            th_lo,
            th_hi,
            &breaks,
            &self.quad,
        )?;
        let tail = self.tail(big_t, |t| {
            let d1 = (t + ax) * (t + ax) + y * y;
            let d2 = (t - ax) * (t - ax) + y * y;
            -2.0 * ax * (t * t - ax * ax - y * y) / (d1 * d2) * FRAC_1_PI
        })?;
        let r = combine(inner, tail);
        Ok(QuadEstimate { value: sign * r.value, ..r })
    }

    /// The same `Q_σ(x+iy)` from the unfolded kernel, integrating the two
    /// half-lines separately. No symmetry is used, so `Q_σ(iy)` comes out of
    /// the quadrature rather than by construction.
    pub fn conjugate_unfolded(&self, x: f64, y: f64) -> Result<QuadEstimate<f64>> {
        if !(y > 0.0) {
            return Err(Error::Parameter(format!("conjugate needs y > 0, got {y}")));
        }
        let big_t = self.split(x.abs(), y).max(1.0);
        let half = |s: f64| -> Result<QuadEstimate<f64>> {
            let k = move |t: f64| {
                let u = s * t;
                // (x−u)/((x−u)²+y²) + u/(1+u²) over a common denominator
                let num = x * (1.0 - u * u) + u * (x * x + y * y - 1.0);
                num / (((x - u) * (x - u) + y * y) * (1.0 + u * u)) * FRAC_1_PI
            };
            let mut breaks = alloc::vec![1.0];
            if s * x > 0.0 {
                breaks.push(x.abs());
            }
            breaks.extend(self.sigma.knots(0.0, big_t, KNOT_LIMIT));
            breaks.sort_by(f64::total_cmp);
            let inner = integrate(|t: f64| Ok(self.sigma.eval(t)? * k(t)), 0.0, big_t, &breaks, &self.quad)?;
            Ok(combine(inner, self.tail(big_t, k)?))
        };
        Ok(combine(half(1.0)?, half(-1.0)?))
    }

    /// `∫_T^∞ σ(t) k(t) dt` in `u = ln t`.
    fn tail(&self, big_t: f64, kernel: impl Fn(f64) -> f64) -> Result<QuadEstimate<f64>> {
        let breaks: Vec<f64> = self.sigma.knots(big_t, big_t * 1e200, KNOT_LIMIT).into_iter().map(ln).collect();
        let cfg = QuadConfig { abs_tol: 0.5 * self.quad.abs_tol, ..self.quad };
        integrate_log_tail(
            |u: f64| {
                let t = exp(u);
                Ok(self.sigma.eval(t)? * kernel(t) * t)
            },
            ln(big_t),
            &breaks,
            &cfg,
        )
    }
}

fn combine(a: QuadEstimate<f64>, b: QuadEstimate<f64>) -> QuadEstimate<f64> {
    QuadEstimate {
        value: a.value + b.value,
        abs_error: a.abs_error + b.abs_error,
        evaluations: a.evaluations + b.evaluations,
    }
}

/// Default tolerances for harmonic extensions: absolute `1e-9`, relative `1e-7`.
pub fn harmonic_quad() -> QuadConfig {
    QuadConfig { abs_tol: 1e-9, rel_tol: 1e-7, max_subdivisions: 20_000 }
}

/// Rejects sequences whose `ω` cannot be evaluated on all of `(0, ∞)`.
pub(crate) fn require_tail(seq: &WeightSequence) -> Result<()> {
    if seq.tail().is_none() {
        return Err(Error::Precondition(format!(
            "{}: harmonic extension needs omega on (0, inf) but the sequence has no tail model",
            seq.label()
        )));
    }
    Ok(())
}

/// Smallest `C` in `[1, 1e6]` with `P_ω(iy) ≤ ω(Cy) + C` on `y_grid`.
///
/// The search runs over 13 log-spaced candidates per decade and is then
/// refined by bisection. `pass` is false when no candidate works. The
/// trajectory holds `(y, ω(Cy) + C − P_ω(iy))`.
pub fn langenbruch_fit(seq: &WeightSequence, y_grid: &[f64], quad: &QuadConfig) -> Result<FitReport> {
    require_tail(seq)?;
    let nq = check_property(&check_seq(seq), Property::Nq);
    if nq.verdict == Verdict::FailsOnPrefix {
        return Err(Error::NqViolation(format!(
            "check sequence of {}: partial sum {} over {} terms keeps growing",
            seq.label(),
            nq.fitted_constant,
            nq.prefix
        )));
    }
    let af = AssociatedFunctions::new(seq);
    let ev = HarmonicEvaluator::new(Omega(seq), *quad);
    let p: Vec<f64> = y_grid.iter().map(|&y| ev.poisson(0.0, y).map(|r| r.value)).collect::<Result<_>>()?;
    let margins =
        |c: f64| -> Result<Vec<f64>> { y_grid.iter().zip(&p).map(|(&y, &pv)| Ok(af.omega(c * y)? + c - pv)).collect() };
    let admissible = |c: f64| -> Result<bool> { Ok(margins(c)?.iter().all(|&m| m >= 0.0)) };
    let candidates = log_grid(1.0, 1e6, 6 * 13 + 1);
    let mut found = None;
    for (i, &c) in candidates.iter().enumerate() {
        if admissible(c)? {
            found = Some(i);
            break;
        }
    }
    let mut constants = BTreeMap::new();
    let name = format!("langenbruch({})", seq.label());
    let Some(i) = found else {
        let m = margins(candidates[candidates.len() - 1])?;
        return Ok(FitReport {
            name,
            constants,
            grid: GridDescriptor::of(y_grid),
            worst_margin: m.iter().copied().fold(f64::INFINITY, f64::min),
            trajectory: y_grid.iter().copied().zip(m).collect(),
            pass: false,
            note: String::from("no admissible C in [1, 1e6]"),
        });
    };
    let mut hi = candidates[i];
    if i > 0 {
        let mut lo = candidates[i - 1];
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if admissible(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let m = margins(hi)?;
    constants.insert(String::from("C"), hi);
    Ok(FitReport {
        name,
        constants,
        grid: GridDescriptor::of(y_grid),
        worst_margin: m.iter().copied().fold(f64::INFINITY, f64::min),
        trajectory: y_grid.iter().copied().zip(m).collect(),
        pass: true,
        note: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assoc::{kappa, kappa_quad, FnWeight};
    use crate::weight_seq::{gevrey, q_gevrey};
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn unfolded_conjugate_matches_folded() {
        let seq = gevrey(2.0, 256).unwrap();
        let ev = HarmonicEvaluator::new(Omega(&seq), harmonic_quad());
        for &(x, y) in &[(0.7, 0.3), (-2.0, 1.5), (0.0, 1.0)] {
            let a = ev.conjugate(x, y).map_err(|e| std::format!("{x},{y}: {e}")).unwrap();
            let b = ev.conjugate_unfolded(x, y).map_err(|e| std::format!("{x},{y}: {e}")).unwrap();
            assert!(
                (a.value - b.value).abs() <= 2.0 * (a.abs_error + b.abs_error) + 1e-8,
                "{x},{y}: {} {}",
                a.value,
                b.value
            );
        }
    }

    #[test]
    fn constant_boundary_data() {
        let ev = HarmonicEvaluator::new(FnWeight(|_t: f64| 3.0), harmonic_quad());
        for &(x, y) in &[(0.0, 1.0), (2.0, 0.1), (-5.0, 3.0), (1e3, 1e-2)] {
            assert!((ev.poisson(x, y).unwrap().value - 3.0).abs() < 1e-8, "{x} {y}");
            assert!(ev.conjugate(x, y).unwrap().value.abs() < 1e-8, "{x} {y}");
        }
    }

    #[test]
    fn log_modulus_boundary_data() {
        // σ(t) = ln|t + i| extends to ln|z + i|, with conjugate arg(z + i) − π/2
        let sigma = FnWeight(|t: f64| 0.5 * ln(1.0 + t * t));
        let ev = HarmonicEvaluator::new(sigma, QuadConfig::new(1e-11, 1e-10));
        assert!((ev.poisson(0.0, 2.0).unwrap().value - ln(3.0)).abs() < 1e-9);
        for &(x, y) in &[(1.5, 0.7), (-4.0, 0.01), (30.0, 5.0)] {
            let exact = 0.5 * ln(x * x + (y + 1.0) * (y + 1.0));
            assert!((ev.poisson(x, y).unwrap().value - exact).abs() < 1e-9);
            let q_exact = libm::atan2(y + 1.0, x) - FRAC_PI_2;
            assert!((ev.conjugate(x, y).unwrap().value - q_exact).abs() < 1e-9, "{x} {y}");
        }
    }

    #[test]
    fn sandwich_and_lower_bound() {
        let s = gevrey(2.0, 128).unwrap();
        let ev = HarmonicEvaluator::new(Omega(&s), harmonic_quad());
        let af = AssociatedFunctions::new(&s);
        for y in log_grid(0.1, 1e5, 8) {
            let p = ev.poisson(0.0, y).unwrap();
            let k = kappa(&Omega(&s), y, &kappa_quad()).unwrap();
            let eps = p.abs_error + k.abs_error;
            assert!(p.value <= k.value + eps && k.value * FRAC_1_PI <= p.value + eps);
            assert!(p.value + eps >= af.omega(y).unwrap());
        }
    }

    #[test]
    fn conjugate_vanishes_on_imaginary_axis_and_is_odd() {
        let s = q_gevrey(2.0, 2.0, 128).unwrap();
        let ev = HarmonicEvaluator::new(Omega(&s), harmonic_quad());
        assert_eq!(ev.conjugate(0.0, 1.0).unwrap().value, 0.0);
        let a = ev.conjugate(2.0, 0.5).unwrap().value;
        let b = ev.conjugate(-2.0, 0.5).unwrap().value;
        assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn cauchy_riemann() {
        let s = gevrey(2.0, 128).unwrap();
        let ev = HarmonicEvaluator::new(Omega(&s), QuadConfig::new(1e-12, 1e-11).with_max_subdivisions(100_000));
        for &(x, y) in &[(1.0, 1.0), (3.0, 0.5), (-2.0, 4.0)] {
            let h = 1e-3;
            let px = (ev.poisson(x + h, y).unwrap().value - ev.poisson(x - h, y).unwrap().value) / (2.0 * h);
            let qy = (ev.conjugate(x, y + h).unwrap().value - ev.conjugate(x, y - h).unwrap().value) / (2.0 * h);
            assert!((px - qy).abs() <= 1e-4 * px.abs().max(qy.abs()).max(1e-3), "{x} {y}: {px} {qy}");
            let py = (ev.poisson(x, y + h).unwrap().value - ev.poisson(x, y - h).unwrap().value) / (2.0 * h);
            let qx = (ev.conjugate(x + h, y).unwrap().value - ev.conjugate(x - h, y).unwrap().value) / (2.0 * h);
            assert!((py + qx).abs() <= 1e-4 * py.abs().max(qx.abs()).max(1e-3), "{x} {y}: {py} {qx}");
        }
    }

    #[test]
    fn langenbruch() {
        let grid = log_grid(0.01, 1e4, 20);
        let r = langenbruch_fit(&gevrey(2.0, 128).unwrap(), &grid, &harmonic_quad()).unwrap();
        assert!(r.pass && r.worst_margin >= 0.0);
        assert!(matches!(
            langenbruch_fit(&gevrey(0.5, 128).unwrap(), &grid, &harmonic_quad()),
            Err(Error::NqViolation(_))
        ));
    }
}
