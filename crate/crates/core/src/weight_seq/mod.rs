//! Weight sequences on a finite log-domain prefix.

mod bang;
mod gamma;
mod properties;
mod tail;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use bang::{bang_h, bang_rn, BangSum};
pub use gamma::{gamma_condition, gamma_estimate, gamma_estimate_capped, GammaEstimate};
pub use properties::{
    almost_increasing_constant, check_property, check_property_with, CertificateConfig, Property, PropertyCertificate,
    Verdict,
};
pub use tail::TailModel;

use crate::error::{Error, Result};
use crate::fmath::{exp, ln, ln_factorial, powf};

pub(crate) const MIN_PREFIX: usize = 8;

/// A weight sequence `M = (M_p)` known through `N` quotients
/// `m_p = M_{p+1}/M_p` and the terms `M_0 = 1, …, M_N`, all stored as
/// natural logarithms.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct WeightSequence {
    label: String,
    log_quotients: Vec<f64>,
    log_terms: Vec<f64>,
    tail: TailModel,
    #[cfg_attr(feature = "serde", serde(skip))]
    omega_at_knots: Vec<f64>,
}

impl WeightSequence {
    fn from_parts(label: String, log_quotients: Vec<f64>, log_terms: Vec<f64>, tail: TailModel) -> Result<Self> {
        if log_quotients.len() < MIN_PREFIX {
            return Err(Error::DegeneratePrefix(log_quotients.len()));
        }
        debug_assert_eq!(log_terms.len(), log_quotients.len() + 1);
        if log_quotients.iter().chain(&log_terms).any(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("{label}: non-finite log entry")));
        }
        let mut omega_at_knots = Vec::with_capacity(log_quotients.len());
        let mut acc = 0.0;
        omega_at_knots.push(0.0);
        for j in 0..log_quotients.len() - 1 {
            let step = log_quotients[j + 1] - log_quotients[j];
            if step > 0.0 {
                acc += (j + 1) as f64 * step;
            }
            omega_at_knots.push(acc);
        }
        Ok(Self { label, log_quotients, log_terms, tail, omega_at_knots })
    }

    fn from_quotients(label: String, log_quotients: Vec<f64>, tail: TailModel) -> Result<Self> {
        let mut log_terms = Vec::with_capacity(log_quotients.len() + 1);
        log_terms.push(0.0);
        let mut acc = 0.0;
        for q in &log_quotients {
            acc += q;
            log_terms.push(acc);
        }
        Self::from_parts(label, log_quotients, log_terms, tail)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of stored quotients `N`.
    pub fn len(&self) -> usize {
        self.log_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `ln m_p`, `p < N`.
    pub fn log_quotient(&self, p: usize) -> f64 {
        self.log_quotients[p]
    }

    /// `ln M_p`, `p ≤ N`.
    pub fn log_term(&self, p: usize) -> f64 {
        self.log_terms[p]
    }

    pub fn log_quotients(&self) -> &[f64] {
        &self.log_quotients
    }

    pub fn log_terms(&self) -> &[f64] {
        &self.log_terms
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }

    /// `ω(m_k)` for every quotient index `k` (requires nondecreasing quotients).
    pub(crate) fn omega_at_knots(&self) -> &[f64] {
        &self.omega_at_knots
    }

    /// True when the stored quotients are nondecreasing.
    pub fn is_log_convex(&self) -> bool {
        self.log_quotients.windows(2).all(|w| w[1] >= w[0] - 1e-14 * w[0].abs().max(1.0))
    }

    /// Largest `t` at which prefix evaluation is exact: `m_{N−1}`.
    pub fn domain_limit(&self) -> f64 {
        exp(self.log_quotients[self.len() - 1])
    }

    /// Prefix of the first `n` quotients, keeping the tail model.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        let n = n.min(self.len());
        Self::from_parts(
            self.label.clone(),
            self.log_quotients[..n].to_vec(),
            self.log_terms[..=n].to_vec(),
            self.tail.clone(),
        )
    }
}

fn check_prefix(n: usize) -> Result<()> {
    if n < MIN_PREFIX {
        Err(Error::DegeneratePrefix(n))
    } else {
        Ok(())
    }
}

/// Gevrey sequence `M_p = p!^alpha`.
pub fn gevrey(alpha: f64, n: usize) -> Result<WeightSequence> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("gevrey order must be positive, got {alpha}")));
    }
    check_prefix(n)?;
    let lq = (0..n).map(|p| alpha * ln((p + 1) as f64)).collect();
    WeightSequence::from_quotients(format!("gevrey({alpha})"), lq, TailModel::Gevrey { alpha })
}

/// q-Gevrey sequence `M_p = q^(p^sigma)`.
pub fn q_gevrey(q: f64, sigma: f64, n: usize) -> Result<WeightSequence> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::Parameter(format!("q must exceed 1, got {q}")));
    }
    if !(sigma > 1.0 && sigma <= 2.0) {
        return Err(Error::Parameter(format!("sigma must lie in (1, 2], got {sigma}")));
    }
    check_prefix(n)?;
    let ln_q = ln(q);
    let lq = (0..n).map(|p| ln_q * tail::q_gevrey_diff(p as f64, sigma)).collect();
    let lt = (0..=n).map(|p| ln_q * powf(p as f64, sigma)).collect();
    WeightSequence::from_parts(format!("q_gevrey({q},{sigma})"), lq, lt, TailModel::QGevrey { ln_q, sigma })
}

/// `M_p = p!^alpha · Π_{m=0}^{p} ln(e+m)^beta`, with quotients replaced by
/// their running maximum when they fail to be nondecreasing.
pub fn m_alpha_beta(alpha: f64, beta: f64, n: usize) -> Result<WeightSequence> {
    if !(alpha >= 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::Parameter(format!("need alpha >= 0 and finite beta, got ({alpha}, {beta})")));
    }
    check_prefix(n)?;
    let e = core::f64::consts::E;
    let mut lq: Vec<f64> = (0..n)
        .map(|p| {
            let k = (p + 1) as f64;
            alpha * ln(k) + beta * ln(ln(e + k))
        })
        .collect();
    let mut label = format!("m_alpha_beta({alpha},{beta})");
    let mut repaired = false;
    for p in 1..n {
        if lq[p] < lq[p - 1] {
            lq[p] = lq[p - 1];
            repaired = true;
        }
    }
    if repaired {
        label.push_str("[lc-repaired]");
    }
    let tail = if beta == 0.0 && alpha > 0.0 { TailModel::Gevrey { alpha } } else { TailModel::None };
    WeightSequence::from_quotients(label, lq, tail)
}

/// Sequence from explicit `ln M_0, …, ln M_N`; the entries are shifted so
/// that `ln M_0 = 0`.
pub fn from_log_terms(label: &str, log_terms: &[f64], tail: TailModel) -> Result<WeightSequence> {
    if log_terms.len() < MIN_PREFIX + 1 {
        return Err(Error::DegeneratePrefix(log_terms.len().saturating_sub(1)));
    }
    let shift = log_terms[0];
    let lt: Vec<f64> = log_terms.iter().map(|v| v - shift).collect();
    let lq = lt.windows(2).map(|w| w[1] - w[0]).collect();
    WeightSequence::from_parts(String::from(label), lq, lt, tail)
}

/// `p! M_p`.
pub fn hat(seq: &WeightSequence) -> WeightSequence {
    let lq = seq.log_quotients.iter().enumerate().map(|(p, v)| v + ln((p + 1) as f64)).collect();
    let lt = seq.log_terms.iter().enumerate().map(|(p, v)| v + ln_factorial(p as f64)).collect();
    WeightSequence::from_parts(format!("hat({})", seq.label), lq, lt, seq.tail.hatted()).expect("length preserved")
}

/// `M_p / p!` (quotients may fail to be nondecreasing).
pub fn check_seq(seq: &WeightSequence) -> WeightSequence {
    let lq = seq.log_quotients.iter().enumerate().map(|(p, v)| v - ln((p + 1) as f64)).collect();
    let lt = seq.log_terms.iter().enumerate().map(|(p, v)| v - ln_factorial(p as f64)).collect();
    WeightSequence::from_parts(format!("check({})", seq.label), lq, lt, seq.tail.checked()).expect("length preserved")
}

/// `M_p^s`.
pub fn power(seq: &WeightSequence, s: f64) -> Result<WeightSequence> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Parameter(format!("power exponent must be positive, got {s}")));
    }
    let lq = seq.log_quotients.iter().map(|v| s * v).collect();
    let lt = seq.log_terms.iter().map(|v| s * v).collect();
    WeightSequence::from_parts(format!("({})^{s}", seq.label), lq, lt, seq.tail.powered(s))
}

/// Convolved sequence `L_p = min_{0≤q≤p} M¹_q M²_{p−q}`.
///
/// Computed both by the min formula and by merging the sorted quotient
/// lists; the two must agree to `1e-12` relative in the log domain.
pub fn convolve(a: &WeightSequence, b: &WeightSequence) -> Result<WeightSequence> {
    let n = a.len().min(b.len());
    let mut lt = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let mut best = f64::INFINITY;
        for q in 0..=p {
            let v = a.log_terms[q] + b.log_terms[p - q];
            if v < best {
                best = v;
            }
        }
        lt.push(best);
    }
    let mut merged: Vec<f64> = a.log_quotients[..n].iter().chain(&b.log_quotients[..n]).copied().collect();
    merged.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    for p in 0..n {
        acc += merged[p];
        let tol = 1e-12 * lt[p + 1].abs().max(1.0);
        if (acc - lt[p + 1]).abs() > tol {
            return Err(Error::Consistency(format!(
                "convolution constructions disagree at p = {}: min formula {}, merged quotients {}",
                p + 1,
                lt[p + 1],
                acc
            )));
        }
    }
    let lq = lt.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = match (a.tail.is_none(), b.tail.is_none()) {
        (false, false) => TailModel::Convolved {
            left: alloc::boxed::Box::new(a.tail.clone()),
            right: alloc::boxed::Box::new(b.tail.clone()),
        },
        _ => TailModel::None,
    };
    WeightSequence::from_parts(format!("{}*{}", a.label, b.label), lq, lt, tail)
}

/// Replaces constancy plateaus of the quotients by geometric interpolation
/// so that the result is strictly increasing and stays within a factor
/// `a_cap` of the input.
pub fn strictify_quotients(seq: &WeightSequence, a_cap: f64) -> Result<WeightSequence> {
    if !(a_cap > 1.0) {
        return Err(Error::Parameter(format!("a_cap must exceed 1, got {a_cap}")));
    }
    if !seq.is_log_convex() {
        return Err(Error::Precondition(String::from("quotients must be nondecreasing")));
    }
    let lq = &seq.log_quotients;
    let n = lq.len();
    if lq.iter().all(|&v| v == lq[0]) {
        return Err(Error::CannotStrictify);
    }
    let ln_cap = ln(a_cap);
    let mut out = lq.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && lq[end] == lq[start] {
            end += 1;
        }
        let len = end - start;
        if len > 1 {
            // growth over the plateau limited by the cap and by the next jump
            let room = if end < n { (lq[end] - lq[start]).min(ln_cap) } else { ln_cap };
            let ln_delta = 0.5 * room / (len - 1) as f64;
            for (k, v) in out[start..end].iter_mut().enumerate() {
                *v = lq[start] + k as f64 * ln_delta;
            }
        }
        start = end;
    }
    let label = format!("strict({})", seq.label);
    WeightSequence::from_quotients(label, out, TailModel::None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_fact(p: usize) -> f64 {
        (2..=p).map(|k| ln(k as f64)).sum()
    }

    #[test]
    fn gevrey_terms() {
        let s = gevrey(1.0, 16).unwrap();
        assert!((s.log_term(4) - ln(24.0)).abs() < 1e-14);
        let s2 = gevrey(2.0, 16).unwrap();
        assert!((exp(s2.log_quotient(3)) - 16.0).abs() < 1e-12);
        assert!(matches!(gevrey(1.0, 7), Err(Error::DegeneratePrefix(7))));
        assert!(gevrey(0.0, 16).is_err());
    }

    #[test]
    fn terms_and_quotients_are_consistent() {
        for s in [gevrey(1.5, 64).unwrap(), q_gevrey(2.0, 1.5, 64).unwrap(), m_alpha_beta(1.0, 1.0, 64).unwrap()] {
            for p in 0..s.len() {
                let d = s.log_term(p + 1) - s.log_term(p);
                assert!((d - s.log_quotient(p)).abs() <= 1e-12 * s.log_term(p + 1).abs().max(1.0), "{}", s.label());
            }
            assert_eq!(s.log_term(0), 0.0);
        }
    }

    #[test]
    fn q_gevrey_params() {
        let s = q_gevrey(2.0, 2.0, 32).unwrap();
        assert!((s.log_term(7) - 49.0 * ln(2.0)).abs() < 1e-12);
        assert!((exp(s.log_quotient(1)) - 8.0).abs() < 1e-12);
        assert!(q_gevrey(2.0, 2.5, 32).is_err());
        assert!(q_gevrey(2.0, 1.0, 32).is_err());
        assert!(q_gevrey(1.0, 2.0, 32).is_err());
    }

    #[test]
    fn alpha_beta_reduces_and_repairs() {
        let a = m_alpha_beta(1.0, 0.0, 16).unwrap();
        let g = gevrey(1.0, 16).unwrap();
        for p in 0..=16 {
            assert!((a.log_term(p) - g.log_term(p)).abs() < 1e-12);
        }
        let r = m_alpha_beta(1.0, -1.0, 32).unwrap();
        assert!(r.is_log_convex());
        let raw = m_alpha_beta(0.0, -1.0, 32).unwrap();
        assert!(raw.label().contains("lc-repaired"));
        assert!(raw.is_log_convex());
    }

    #[test]
    fn combinators() {
        let h = hat(&gevrey(1.0, 16).unwrap());
        for p in 0..=16 {
            assert!((h.log_term(p) - 2.0 * ln_fact(p)).abs() < 1e-10);
        }
        let pw = power(&q_gevrey(2.0, 2.0, 32).unwrap(), 3.0).unwrap();
        for p in 0..=32 {
            assert!((pw.log_term(p) - 3.0 * (p * p) as f64 * ln(2.0)).abs() < 1e-9);
        }
        let c = check_seq(&gevrey(0.5, 16).unwrap());
        for p in 0..16 {
            assert!((c.log_quotient(p) + 0.5 * ln((p + 1) as f64)).abs() < 1e-14);
        }
        assert!(!c.is_log_convex());
    }

    #[test]
    fn convolve_gevrey_pair() {
        let g = gevrey(1.0, 16).unwrap();
        let l = convolve(&g, &g).unwrap();
        assert!((l.log_term(4) - ln(4.0)).abs() < 1e-12);
        for p in 0..=16 {
            let oracle = ln_fact(p / 2) + ln_fact(p - p / 2);
            assert!((l.log_term(p) - oracle).abs() < 1e-12);
            assert!(l.log_term(p) <= g.log_term(p) + 1e-12);
        }
    }

    #[test]
    fn strictify_cases() {
        let g = gevrey(1.0, 16).unwrap();
        let s = strictify_quotients(&g, 2.0).unwrap();
        assert_eq!(s.log_quotients(), g.log_quotients());

        let mut lt = alloc::vec![0.0];
        let qs = [1.0f64, 1.0, 2.0, 3.0, 3.0, 3.0, 5.0, 8.0, 9.0, 9.0];
        for q in qs {
            let last = *lt.last().unwrap();
            lt.push(last + ln(q));
        }
        let seq = from_log_terms("plateaus", &lt, TailModel::None).unwrap();
        let cap = 1.5;
        let s = strictify_quotients(&seq, cap).unwrap();
        for p in 0..qs.len() {
            let ratio = exp(s.log_quotient(p) - seq.log_quotient(p));
            assert!((1.0..=cap + 1e-12).contains(&ratio), "p={p} ratio={ratio}");
            if p > 0 {
                assert!(s.log_quotient(p) > s.log_quotient(p - 1));
            }
        }
        // (1, 1, 2): middle becomes 1+δ with 1+δ ≤ min(cap, 2)
        assert!(exp(s.log_quotient(1)) <= 1.5 && exp(s.log_quotient(1)) > 1.0);

        let flat = from_log_terms("flat", &[0.0; 12], TailModel::None).unwrap();
        assert_eq!(strictify_quotients(&flat, 2.0), Err(Error::CannotStrictify));
    }
}
