use super::properties::{check_property, gamma_beta, nested_prefixes};
use super::{Property, PropertyCertificate, WeightSequence};
use crate::fmath::exp;

/// Result of estimating the growth index from a prefix.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "value", rename_all = "snake_case"))]
pub enum GammaEstimate {
    Finite(f64),
    /// Every tested `β` up to the cap was stable.
    AtLeastCap(f64),
}

impl GammaEstimate {
    /// The estimate, or the cap when it binds.
    pub fn value(&self) -> f64 {
        match *self {
            GammaEstimate::Finite(v) | GammaEstimate::AtLeastCap(v) => v,
        }
    }

    pub fn is_capped(&self) -> bool {
        matches!(self, GammaEstimate::AtLeastCap(_))
    }
}

/// Fits the (γ_β) constant `A = max_{p ≤ N/2} (m_p^{1/β}/(p+1)) Σ_{ℓ=p}^{N−1} m_ℓ^{−1/β}`.
pub fn gamma_condition(seq: &WeightSequence, beta: f64) -> PropertyCertificate {
    check_property(seq, Property::GammaBeta(beta))
}

/// Largest `β ≤ beta_max` (default 8) whose (γ_β) constant is stable when
/// the usable prefix doubles.
///
/// Stability means the increments of the fitted constant across the nested
/// prefixes `N/4 → N/2 → N` contract (or are negligible). For power-law
/// quotients the contraction ratio is `2^{1−γ/β}`, so the threshold sits at
/// `β = γ`.
pub fn gamma_estimate(seq: &WeightSequence) -> GammaEstimate {
    gamma_estimate_capped(seq, 8.0)
}

pub fn gamma_estimate_capped(seq: &WeightSequence, beta_max: f64) -> GammaEstimate {
    let lq = seq.log_quotients();
    let stable = |beta: f64| doubling_stable(lq, beta);
    if stable(beta_max) {
        return GammaEstimate::AtLeastCap(beta_max);
    }
    let mut lo = 1e-3;
    if !stable(lo) {
        return GammaEstimate::Finite(0.0);
    }
    let mut hi = beta_max;
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if stable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    GammaEstimate::Finite(lo)
}

fn doubling_stable(lq: &[f64], beta: f64) -> bool {
    let prefixes = nested_prefixes(lq.len());
    if prefixes.len() < 3 {
        return false;
    }
    let a: [f64; 3] = core::array::from_fn(|i| exp(gamma_beta(&lq[..prefixes[i]], beta).0));
    let (d1, d2) = (a[1] - a[0], a[2] - a[1]);
    d2 <= 1e-9 * a[2] || (d1 > 0.0 && d2 < d1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight_seq::{gevrey, power, q_gevrey, Verdict};

    #[test]
    fn gevrey_index() {
        let g = gamma_estimate(&gevrey(1.5, 512).unwrap());
        assert!(!g.is_capped());
        assert!((1.4..=1.6).contains(&g.value()), "{g:?}");
    }

    #[test]
    fn q_gevrey_index_hits_cap() {
        assert_eq!(gamma_estimate(&q_gevrey(2.0, 2.0, 512).unwrap()), GammaEstimate::AtLeastCap(8.0));
    }

    #[test]
    fn ramified_index_scales() {
        let g = gevrey(1.0, 512).unwrap();
        let a = gamma_estimate(&g).value();
        let b = gamma_estimate(&power(&g, 2.0).unwrap()).value();
        assert!((b - 2.0 * a).abs() <= 0.15, "{a} {b}");
    }

    #[test]
    fn gamma_two_fails_for_gevrey_one() {
        let c = gamma_condition(&gevrey(1.0, 512).unwrap(), 2.0);
        assert_eq!(c.verdict, Verdict::FailsOnPrefix);
        assert!(c.trajectory.windows(2).all(|w| w[1].1 > w[0].1));
        // oracle: partial sums of (ℓ+1)^{-1/2} at p = 0
        let oracle: f64 = (0..512).map(|l| 1.0 / crate::fmath::sqrt((l + 1) as f64)).sum();
        assert!(c.fitted_constant >= oracle * (1.0 - 1e-12));
    }
}
