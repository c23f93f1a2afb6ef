use alloc::vec::Vec;

use super::{WeightSequence, MIN_PREFIX};
use crate::fmath::{exp, ln};

/// Growth conditions that can be certified on a prefix.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Property {
    Lc,
    Dc,
    Mg,
    Nq,
    Snq,
    GammaBeta(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    HoldsOnPrefix,
    FailsOnPrefix,
    Inconclusive,
}

/// Outcome of checking one property on the stored prefix.
///
/// `trajectory` lists `(prefix length, fitted constant)` for the nested
/// prefixes `N/4, N/2, N` (those of length at least 8), so stabilization can
/// be judged by the caller.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PropertyCertificate {
    pub property: Property,
    pub verdict: Verdict,
    pub fitted_constant: f64,
    pub witness_index: usize,
    pub prefix: usize,
    pub trajectory: Vec<(usize, f64)>,
}

/// Thresholds used to turn fitted constants into verdicts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateConfig {
    /// Largest admissible growth exponent `log2(C_N / C_{N/2})` of a fitted
    /// constant before it is declared not to stabilize.
    pub growth_threshold: f64,
    /// Decay exponent of the (nq) terms above which the series is taken to
    /// converge.
    pub nq_converges_above: f64,
    /// Decay exponent below which the series is taken to diverge.
    pub nq_diverges_below: f64,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self { growth_threshold: 0.05, nq_converges_above: 1.1, nq_diverges_below: 1.0 }
    }
}

/// `max_{p ≤ q} values[p] / values[q]`; equals 1 exactly when `values` is
/// nondecreasing.
pub fn almost_increasing_constant(values: &[f64]) -> f64 {
    let mut running_max = f64::NEG_INFINITY;
    let mut best: f64 = 1.0;
    for &v in values {
        running_max = running_max.max(v);
        best = best.max(running_max / v);
    }
    best
}

pub fn check_property(seq: &WeightSequence, property: Property) -> PropertyCertificate {
    check_property_with(seq, property, &CertificateConfig::default())
}

pub fn check_property_with(seq: &WeightSequence, property: Property, cfg: &CertificateConfig) -> PropertyCertificate {
    let lq = seq.log_quotients();
    let lt = seq.log_terms();
    match property {
        Property::Lc => lc(lq),
        Property::Dc => growth_certificate(property, lq.len(), cfg, |n| dc(&lq[..n])),
        Property::Mg => growth_certificate(property, lq.len(), cfg, |n| mg(&lt[..=n])),
        Property::Snq => growth_certificate(property, lq.len(), cfg, |n| snq(&lq[..n])),
        Property::GammaBeta(beta) => growth_certificate(property, lq.len(), cfg, |n| gamma_beta(&lq[..n], beta)),
        Property::Nq => nq(lq, cfg),
    }
}

fn lc(lq: &[f64]) -> PropertyCertificate {
    let mut worst = 0.0f64;
    let mut witness = 0;
    for p in 1..lq.len() {
        let d = lq[p - 1] - lq[p];
        if d > worst {
            worst = d;
            witness = p;
        }
    }
    PropertyCertificate {
        property: Property::Lc,
        verdict: if worst <= 1e-14 * lq[witness].abs().max(1.0) {
            Verdict::HoldsOnPrefix
        } else {
            Verdict::FailsOnPrefix
        },
        fitted_constant: exp(worst),
        witness_index: witness,
        prefix: lq.len(),
        trajectory: Vec::new(),
    }
}

/// `(ln constant, witness)` for `D = exp(max ln m_p / (p+1))`.
fn dc(lq: &[f64]) -> (f64, usize) {
    argmax((0..lq.len()).map(|p| lq[p] / (p + 1) as f64))
}

/// `(ln A, witness p+q)` for `A = exp(max (ln M_{p+q} − ln M_p − ln M_q)/(p+q))`.
fn mg(lt: &[f64]) -> (f64, usize) {
    let n = lt.len() - 1;
    let mut best = 0.0;
    let mut witness = 0;
    for k in 2..=n {
        for p in 1..=k / 2 {
            let v = (lt[k] - lt[p] - lt[k - p]) / k as f64;
            if v > best {
                best = v;
                witness = k;
            }
        }
    }
    (best, witness)
}

/// `(ln B, witness)` for `B = max_p m_p Σ_{q=p}^{N−1} 1/((q+1) m_q)`.
fn snq(lq: &[f64]) -> (f64, usize) {
    let n = lq.len();
    let mut acc = 1.0 / n as f64;
    let mut best = acc;
    let mut witness = n - 1;
    for p in (0..n - 1).rev() {
        acc = 1.0 / (p + 1) as f64 + exp(lq[p] - lq[p + 1]) * acc;
        if acc > best {
            best = acc;
            witness = p;
        }
    }
    (ln(best), witness)
}

/// `(ln A, witness)` for the (γ_β) constant, maximum over `p ≤ N/2`.
pub(super) fn gamma_beta(lq: &[f64], beta: f64) -> (f64, usize) {
    let n = lq.len();
    let mut s = 1.0;
    let mut best = f64::NEG_INFINITY;
    let mut witness = 0;
    for p in (0..n).rev() {
        if p < n - 1 {
            s = 1.0 + exp((lq[p] - lq[p + 1]) / beta) * s;
        }
        if p <= n / 2 {
            let v = s / (p + 1) as f64;
            if v >= best {
                best = v;
                witness = p;
            }
        }
    }
    (ln(best), witness)
}

fn argmax(values: impl Iterator<Item = f64>) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut at = 0;
    for (i, v) in values.enumerate() {
        if v > best {
            best = v;
            at = i;
        }
    }
    (best, at)
}

/// Nested prefix lengths `N/4, N/2, N` (at least 8 each).
pub(super) fn nested_prefixes(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [n / 4, n / 2, n].into_iter().filter(|&k| k >= MIN_PREFIX).collect();
    v.dedup();
    v
}

fn growth_certificate(
    property: Property,
    n: usize,
    cfg: &CertificateConfig,
    fit: impl Fn(usize) -> (f64, usize),
) -> PropertyCertificate {
    let prefixes = nested_prefixes(n);
    let fits: Vec<(f64, usize)> = prefixes.iter().map(|&k| fit(k)).collect();
    let (ln_c, witness) = *fits.last().expect("n >= 8");
    let verdict = if fits.len() < 2 {
        Verdict::Inconclusive
    } else {
        let (prev, _) = fits[fits.len() - 2];
        let doublings = ln(n as f64 / prefixes[prefixes.len() - 2] as f64) / core::f64::consts::LN_2;
        let growth = (ln_c - prev) / core::f64::consts::LN_2 / doublings;
        if growth > cfg.growth_threshold {
            Verdict::FailsOnPrefix
        } else {
            Verdict::HoldsOnPrefix
        }
    };
    PropertyCertificate {
        property,
        verdict,
        fitted_constant: exp(ln_c),
        witness_index: witness,
        prefix: n,
        trajectory: prefixes.iter().zip(&fits).map(|(&k, &(c, _))| (k, exp(c))).collect(),
    }
}

fn nq(lq: &[f64], cfg: &CertificateConfig) -> PropertyCertificate {
    let n = lq.len();
    let ln_term = |p: usize| -ln((p + 1) as f64) - lq[p];
    let mut partial = Vec::with_capacity(n);
    let mut acc = 0.0;
    for p in 0..n {
        acc += exp(ln_term(p));
        partial.push(acc);
    }
    let (a, b) = (n / 2, n - 1);
    let ln_ratio = ln_term(a) - ln_term(b);
    let decay = ln_ratio / (ln((b + 1) as f64) - ln((a + 1) as f64));
    let verdict = if decay > cfg.nq_converges_above {
        Verdict::HoldsOnPrefix
    } else if decay < cfg.nq_diverges_below {
        Verdict::FailsOnPrefix
    } else {
        Verdict::Inconclusive
    };
    PropertyCertificate {
        property: Property::Nq,
        verdict,
        fitted_constant: acc,
        witness_index: n - 1,
        prefix: n,
        trajectory: nested_prefixes(n).into_iter().map(|k| (k, partial[k - 1])).collect(),
    }
}
