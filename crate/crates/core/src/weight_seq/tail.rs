use alloc::boxed::Box;

use crate::fmath::{exp, expm1, floor, lgamma, ln, ln1p, powf};

/// Closed-form continuation of a sequence beyond its stored prefix.
///
/// All methods take and return log-domain quantities; indices are `f64`
/// because the counting function can exceed the range of any integer type.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum TailModel {
    None,
    /// `M_p = p!^alpha`
    Gevrey {
        alpha: f64,
    },
    /// `M_p = q^(p^sigma)`, stored as `ln q`
    QGevrey {
        ln_q: f64,
        sigma: f64,
    },
    /// `M_p^s`
    Power {
        inner: Box<TailModel>,
        s: f64,
    },
    /// `p! M_p`
    Hat {
        inner: Box<TailModel>,
    },
    /// `M_p / p!`
    Check {
        inner: Box<TailModel>,
    },
    /// Convolution of two sequences: counting functions and `ω` add.
    Convolved {
        left: Box<TailModel>,
        right: Box<TailModel>,
    },
}

impl TailModel {
    pub fn is_none(&self) -> bool {
        matches!(self, TailModel::None)
    }

    /// `ln m_p`, when the model has a closed form for it.
    pub fn log_quotient(&self, p: f64) -> Option<f64> {
        match self {
            TailModel::None | TailModel::Convolved { .. } => None,
            TailModel::Gevrey { alpha } => Some(alpha * ln(p + 1.0)),
            TailModel::QGevrey { ln_q, sigma } => Some(ln_q * q_gevrey_diff(p, *sigma)),
            TailModel::Power { inner, s } => inner.log_quotient(p).map(|v| s * v),
            TailModel::Hat { inner } => inner.log_quotient(p).map(|v| v + ln(p + 1.0)),
            TailModel::Check { inner } => inner.log_quotient(p).map(|v| v - ln(p + 1.0)),
        }
    }

    /// `ln M_p`.
    pub fn log_term(&self, p: f64) -> Option<f64> {
        match self {
            TailModel::None | TailModel::Convolved { .. } => None,
            TailModel::Gevrey { alpha } => Some(alpha * lgamma(p + 1.0)),
            TailModel::QGevrey { ln_q, sigma } => Some(ln_q * powf(p, *sigma)),
            TailModel::Power { inner, s } => inner.log_term(p).map(|v| s * v),
            TailModel::Hat { inner } => inner.log_term(p).map(|v| v + lgamma(p + 1.0)),
            TailModel::Check { inner } => inner.log_term(p).map(|v| v - lgamma(p + 1.0)),
        }
    }

    /// `ν(t) = #{p : m_p ≤ t}` given `ln t`.
    pub fn nu(&self, ln_t: f64) -> Option<f64> {
        match self {
            TailModel::None => None,
            TailModel::Gevrey { alpha } => {
                // (p+1)^alpha <= t  <=>  p+1 <= t^(1/alpha)
                let raw = exp(ln_t / alpha);
                if !raw.is_finite() {
                    return Some(f64::INFINITY);
                }
                let mut k = floor(raw);
                if k < 9.0e15 {
                    while alpha * ln(k + 1.0) <= ln_t {
                        k += 1.0;
                    }
                    while k > 0.0 && alpha * ln(k) > ln_t {
                        k -= 1.0;
                    }
                }
                Some(k)
            }
            TailModel::QGevrey { ln_q, sigma } => {
                let level = ln_t / ln_q;
                Some(count_monotone(|p| q_gevrey_diff(p, *sigma) <= level))
            }
            TailModel::Power { inner, s } => inner.nu(ln_t / s),
            TailModel::Convolved { left, right } => Some(left.nu(ln_t)? + right.nu(ln_t)?),
            TailModel::Hat { .. } | TailModel::Check { .. } => {
                self.log_quotient(0.0)?;
                Some(count_monotone(|p| self.log_quotient(p).is_some_and(|v| v <= ln_t)))
            }
        }
    }

    /// `ω(t) = sup_p (p ln t − ln M_p)` given `ln t`.
    pub fn omega(&self, ln_t: f64) -> Option<f64> {
        match self {
            TailModel::None => None,
            TailModel::Power { inner, s } => inner.omega(ln_t / s).map(|v| s * v),
            TailModel::Convolved { left, right } => Some(left.omega(ln_t)? + right.omega(ln_t)?),
            _ => {
                let n = self.nu(ln_t)?;
                if n == 0.0 {
                    return Some(0.0);
                }
                Some(n * ln_t - self.log_term(n)?)
            }
        }
    }

    pub(crate) fn powered(&self, s: f64) -> TailModel {
        match self {
            TailModel::None => TailModel::None,
            TailModel::Gevrey { alpha } => TailModel::Gevrey { alpha: alpha * s },
            TailModel::QGevrey { ln_q, sigma } => TailModel::QGevrey { ln_q: ln_q * s, sigma: *sigma },
            TailModel::Power { inner, s: s0 } => TailModel::Power { inner: inner.clone(), s: s0 * s },
            other => TailModel::Power { inner: Box::new(other.clone()), s },
        }
    }

    pub(crate) fn hatted(&self) -> TailModel {
        match self {
            TailModel::None => TailModel::None,
            TailModel::Gevrey { alpha } => TailModel::Gevrey { alpha: alpha + 1.0 },
            TailModel::Check { inner } => (**inner).clone(),
            other => TailModel::Hat { inner: Box::new(other.clone()) },
        }
    }

    pub(crate) fn checked(&self) -> TailModel {
        match self {
            TailModel::None => TailModel::None,
            TailModel::Gevrey { alpha } if *alpha > 1.0 => TailModel::Gevrey { alpha: alpha - 1.0 },
            TailModel::Hat { inner } => (**inner).clone(),
            other => TailModel::Check { inner: Box::new(other.clone()) },
        }
    }
}

/// `(p+1)^σ − p^σ` without cancellation for large `p`.
pub(crate) fn q_gevrey_diff(p: f64, sigma: f64) -> f64 {
    if p < 1.0 {
        return powf(p + 1.0, sigma) - powf(p, sigma);
    }
    powf(p, sigma) * expm1(sigma * ln1p(1.0 / p))
}

/// Number of `p ∈ {0, 1, …}` with `pred(p)` true, for a predicate that is
/// true on an initial segment.
fn count_monotone(pred: impl Fn(f64) -> bool) -> f64 {
    if !pred(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while pred(hi) {
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    let mut lo = hi / 2.0;
    if hi == 1.0 {
        lo = 0.0;
    }
    // pred(lo) true, pred(hi) false
    while hi - lo > 1.0 {
        let mid = floor(0.5 * (lo + hi));
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + 1.0
}
