use super::WeightSequence;
use crate::error::{Error, Result};
use crate::fmath::{exp, ln};

/// `R_n = Σ_{k≥n} 1/((k+1) m_k)` truncated at the prefix, with an estimate
/// of the omitted part `Σ_{k≥N}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BangSum {
    pub value: f64,
    /// Power-law extrapolation of the terms beyond the prefix; infinite when
    /// the terms do not decay faster than `1/k`.
    pub truncation_bound: f64,
}

fn ln_term(seq: &WeightSequence, k: usize) -> f64 {
    -ln((k + 1) as f64) - seq.log_quotient(k)
}

fn truncation_bound(seq: &WeightSequence) -> f64 {
    let n = seq.len();
    let (a, b) = (n / 2, n - 1);
    let decay = (ln_term(seq, a) - ln_term(seq, b)) / (ln((b + 1) as f64) - ln((a + 1) as f64));
    if decay <= 1.0 {
        return f64::INFINITY;
    }
    let last = exp(ln_term(seq, b));
    last * n as f64 / (decay - 1.0) * exp((decay - 1.0) * ln(n as f64 / (n - 1) as f64))
}

/// Prefix-truncated `R_n` for `n ≤ N`.
pub fn bang_rn(seq: &WeightSequence, n: usize) -> BangSum {
    let value = (n.min(seq.len())..seq.len()).rev().map(|k| exp(ln_term(seq, k))).sum();
    BangSum { value, truncation_bound: truncation_bound(seq) }
}

/// Step function `h̄(t) = n` for `R_{n+1} < t ≤ R_n`, and `0` for `t > R_0`.
///
/// Fails when `t` is not above the truncation bound, since the prefix then
/// cannot locate the step.
pub fn bang_h(seq: &WeightSequence, t: f64) -> Result<usize> {
    let n = seq.len();
    let mut r = alloc::vec![0.0; n + 1];
    for k in (0..n).rev() {
        r[k] = r[k + 1] + exp(ln_term(seq, k));
    }
    if t > r[0] {
        return Ok(0);
    }
    let bound = truncation_bound(seq);
    if t <= bound || t <= r[n] {
        return Err(Error::PrefixExhausted { t, bound });
    }
    // r is decreasing: largest index with r[i] >= t
    let idx = r.partition_point(|&v| v >= t);
    Ok(idx - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight_seq::gevrey;

    #[test]
    fn gevrey_one_r0_is_basel_sum() {
        let s = gevrey(1.0, 512).unwrap();
        let r0 = bang_rn(&s, 0);
        let basel = core::f64::consts::PI * core::f64::consts::PI / 6.0;
        // omitted tail Σ_{k>512} 1/k² lies in [1/513, 1/512]
        assert!(basel - r0.value >= 1.0 / 513.0 - 1e-12 && basel - r0.value <= 1.0 / 512.0 + 1e-12);
        assert!((r0.value + r0.truncation_bound - basel).abs() < 1e-5);
        let r1 = bang_rn(&s, 1);
        assert!((r1.value + r1.truncation_bound - (basel - 1.0)).abs() < 1e-5);
    }

    #[test]
    fn steps() {
        let s = gevrey(1.0, 256).unwrap();
        let r0 = bang_rn(&s, 0).value;
        assert_eq!(bang_h(&s, r0).unwrap(), 0);
        assert_eq!(bang_h(&s, r0 * 1.5).unwrap(), 0);
        let r3 = bang_rn(&s, 3).value;
        assert_eq!(bang_h(&s, r3).unwrap(), 3);
        assert_eq!(bang_h(&s, r3 * 1.0001).unwrap(), 2);
        assert!(matches!(bang_h(&s, 1e-6), Err(Error::PrefixExhausted { .. })));
        let mut prev = usize::MAX;
        for t in crate::fmath::log_grid(0.01, 3.0, 60) {
            let h = bang_h(&s, t).unwrap();
            assert!(h <= prev);
            prev = h;
        }
    }
}
