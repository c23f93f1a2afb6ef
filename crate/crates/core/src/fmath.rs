//! Thin wrappers so `no_std` code reads like ordinary float code.

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}
#[inline]
pub fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn atan(x: f64) -> f64 {
    libm::atan(x)
}
#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
/// `ln Γ(x)` for `x > 0`.
#[inline]
pub fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln p!`, exact summation for small `p`.
pub fn ln_factorial(p: f64) -> f64 {
    if p < 1.5 {
        return 0.0;
    }
    if p <= 64.0 {
        let mut s = 0.0;
        let mut k = 2.0;
        while k <= p {
            s += ln(k);
            k += 1.0;
        }
        return s;
    }
    lgamma(p + 1.0)
}

/// Log-spaced grid with `n` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> alloc::vec::Vec<f64> {
    let (a, b) = (ln(lo), ln(hi));
    if n == 1 {
        return alloc::vec![lo];
    }
    (0..n).map(|i| if i == n - 1 { hi } else { exp(a + (b - a) * i as f64 / (n - 1) as f64) }).collect()
}
