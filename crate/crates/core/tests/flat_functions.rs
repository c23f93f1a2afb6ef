use proptest::prelude::*;
use ultraflat_core::assoc::q_gevrey_b;
use ultraflat_core::flat::{combine_product_constants, sample_flatness};
use ultraflat_core::{
    convolve, flat_product, flat_q_gevrey_s2, flat_q_gevrey_sgamma, log_grid, q_gevrey, reference_exp, verify_flatness,
    AssociatedFunctions, FlatnessConfig, FlatnessGrid, Polar, Sector,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closed_forms_are_conjugate_symmetric(q in 1.2f64..5.0, sigma in 1.1f64..2.0, gamma in 2.0f64..6.0,
                                            lr in -8.0f64..3.0, frac in -0.99f64..0.99) {
        let r = 10f64.powf(lr);
        let fs = [
            flat_q_gevrey_s2(q, sigma).unwrap(),
            flat_q_gevrey_sgamma(q, sigma, gamma).unwrap(),
            reference_exp(Sector::new(1.0).unwrap()),
        ];
        for f in &fs {
            let theta = frac * f.sector().half_opening();
            let a = f.log_eval(Polar::new(r, theta)).unwrap();
            let b = f.log_eval(Polar::new(r, -theta)).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-10 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn positive_axis_modulus_grows_with_r(q in 1.2f64..5.0, sigma in 1.1f64..2.0, gamma in 2.0f64..6.0) {
        for f in [flat_q_gevrey_s2(q, sigma).unwrap(), flat_q_gevrey_sgamma(q, sigma, gamma).unwrap()] {
            let mut prev = f64::NEG_INFINITY;
            for r in log_grid(1e-6, 10.0, 60) {
                let v = f.log_positive_axis(r).unwrap();
                prop_assert!(v >= prev);
                prev = v;
            }
        }
    }
}

#[test]
fn q_gevrey_h_sandwich() {
    for &(q, sigma) in &[(2.0, 2.0), (std::f64::consts::E, 2.0), (2.0, 1.5)] {
        let s = sigma / (sigma - 1.0);
        let b = q_gevrey_b(q, s);
        let qs = q.powf(s / (s - 1.0));
        let seq = q_gevrey(q, sigma, 512).unwrap();
        let f = AssociatedFunctions::new(&seq);
        let t_max = q.powf(-2.0 * s / (s - 1.0));
        for t in log_grid(1e-30, t_max, 40) {
            let lh = f.ln_h(t).unwrap();
            let lo = -b * (1.0 / t).ln().powf(s);
            let hi = qs.ln() - b * (1.0 / (qs * t)).ln().powf(s);
            assert!(lo <= lh + 1e-12 * lh.abs(), "({q},{sigma}) t = {t}: {lo} > {lh}");
            assert!(lh <= hi + 1e-12 * lh.abs(), "({q},{sigma}) t = {t}: {lh} > {hi}");
        }
    }
}

#[test]
fn product_constants_bound_the_product() {
    let (q, sigma) = (2.0, 1.5);
    let g = flat_q_gevrey_s2(q, sigma).unwrap();
    let h = flat_q_gevrey_s2(3.0, 1.5).unwrap();
    let (sg, sh) = (q_gevrey(q, sigma, 256).unwrap(), q_gevrey(3.0, 1.5, 256).unwrap());
    let grid = FlatnessGrid::new(log_grid(1e-4, 10.0, 30), 9, 0.95);
    let cfg = FlatnessConfig::default();
    let rg = verify_flatness(&g, &sg, &grid, &cfg).unwrap();
    let rh = verify_flatness(&h, &sh, &grid, &cfg).unwrap();
    assert!(rg.pass && rh.pass);
    let [k1, k2, k3, k4] = combine_product_constants(&rg, &rh);
    assert_eq!(k1, rg.k1 * rh.k1);
    assert_eq!(k2, rg.k2.min(rh.k2));
    assert_eq!(k3, rg.k3 * rh.k3);
    assert_eq!(k4, rg.k4.max(rh.k4));
    let p = flat_product(&g, &h).unwrap();
    let l = convolve(&sg, &sh).unwrap();
    let fl = AssociatedFunctions::new(&l);
    let samples = sample_flatness(&p, &grid).unwrap();
    for (z, lg) in &samples.sector {
        assert!(*lg <= k3.ln() + fl.ln_h(k4 * z.r).unwrap() + 1e-9);
    }
    for (x, lg) in &samples.axis {
        assert!(*lg >= k1.ln() + fl.ln_h(k2 * x).unwrap() - 1e-9);
    }
    let rp = verify_flatness(&p, &l, &grid, &cfg).unwrap();
    assert!(rp.pass, "{rp:?}");
}

#[test]
fn one_is_a_product_identity() {
    let g = flat_q_gevrey_s2(2.0, 2.0).unwrap();
    let p = flat_product(&g, &ultraflat_core::flat::one(g.sector())).unwrap();
    for z in [Polar::new(0.3, 1.0), Polar::new(1e-3, -2.9)] {
        assert_eq!(p.eval(z).unwrap(), g.eval(z).unwrap());
    }
}
