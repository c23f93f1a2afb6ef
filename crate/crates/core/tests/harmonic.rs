use ultraflat_core::harmonic::harmonic_quad;
use ultraflat_core::{gevrey, FnWeight, HarmonicEvaluator, Omega, Weight};

fn p_of<W: Weight>(w: W, x: f64, y: f64) -> (f64, f64) {
    let e = HarmonicEvaluator::new(w, harmonic_quad()).poisson(x, y).unwrap();
    (e.value, e.abs_error)
}

#[test]
fn poisson_is_monotone_in_the_weight() {
    let small = |t: f64| (1.0 + t.abs()).ln();
    let large = |t: f64| 2.0 * (1.0 + t.abs()).ln() + 0.1;
    for &(x, y) in &[(0.0, 0.5), (1.0, 2.0), (-3.0, 0.1)] {
        let (a, ea) = p_of(FnWeight(small), x, y);
        let (b, eb) = p_of(FnWeight(large), x, y);
        assert!(a <= b + 2.0 * (ea + eb));
    }
}

#[test]
fn poisson_is_linear_in_the_weight() {
    let s1 = |t: f64| (1.0 + t * t).ln();
    let s2 = |t: f64| (1.0 + t.abs()).sqrt();
    let (l, m) = (0.7, 2.5);
    for &(x, y) in &[(0.3, 0.7), (-2.0, 5.0)] {
        let (a, ea) = p_of(FnWeight(s1), x, y);
        let (b, eb) = p_of(FnWeight(s2), x, y);
        let (c, ec) = p_of(FnWeight(move |t: f64| l * s1(t) + m * s2(t)), x, y);
        assert!((c - (l * a + m * b)).abs() <= l * ea + m * eb + ec + 1e-9);
    }
}

#[test]
fn poisson_scales_with_the_argument() {
    let seq = gevrey(2.0, 256).unwrap();
    let c = 3.0;
    let scaled = FnWeight(|t: f64| Omega(&seq).eval(c * t).unwrap());
    for &(x, y) in &[(0.0, 1.0), (0.5, 0.2)] {
        let (a, ea) = p_of(scaled, x, y);
        let (b, eb) = p_of(Omega(&seq), c * x, c * y);
        assert!((a - b).abs() <= 2.0 * (ea + eb) + 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
    }
}
