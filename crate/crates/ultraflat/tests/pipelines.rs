use ultraflat::pipelines;
use ultraflat_core::borel::{moment_quad, polar_grid, remainder_table, ExtendConfig};
use ultraflat_core::flat::sample_flatness;
use ultraflat_core::{
    flat_q_gevrey_s2, kernel_from_flat, log_grid, moments, q_gevrey, ExtensionOperator, FlatnessGrid, FormalSeries,
};

#[test]
fn parallel_drivers_match_sequential_routines() {
    let seq = q_gevrey(2.0, 2.0, 64).unwrap();
    let flat = flat_q_gevrey_s2(2.0, 2.0).unwrap();
    let grid = FlatnessGrid::new(log_grid(1e-4, 10.0, 20), 7, 0.9);
    assert_eq!(pipelines::sample_flatness(&flat, &grid).unwrap(), sample_flatness(&flat, &grid).unwrap());

    let k = kernel_from_flat(&flat);
    let par = pipelines::moments(&k, &seq, 30, &moment_quad()).unwrap();
    let ser = moments(&k, &seq, 30, &moment_quad()).unwrap();
    assert_eq!(par.log_moments(), ser.log_moments());
    assert_eq!((par.b1(), par.b2()), (ser.b1(), ser.b2()));

    let f = FormalSeries::alternating_mp(&seq, 1.0, 30).unwrap();
    let op = ExtensionOperator::new(&f, &par, &ExtendConfig::default()).unwrap();
    let pts = polar_grid(&log_grid(1e-3, 0.3, 5), 3, 2.0);
    assert_eq!(pipelines::remainder_table(&op, &pts, 8).unwrap(), remainder_table(&op, &pts, 8).unwrap());
}
