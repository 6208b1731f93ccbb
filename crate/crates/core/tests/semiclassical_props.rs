use dwlab_core::semiclassical::{
    critical_lambda, energy_per_particle, stationarity, stationary_z, z_min, BOUNDARY_MARGIN,
    DEFAULT_JUMP_THRESHOLD, DEFAULT_RESOLUTION,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn stationarity_is_energy_derivative(
        z in -0.95f64..0.95,
        lambda in 0.0f64..4.0,
        tilt in 0.0f64..0.2,
        n in prop::sample::select(vec![2usize, 10, 800, 9000]),
    ) {
        let h = 1e-6;
        let up = energy_per_particle(z + h, 0.0, lambda, tilt, n).unwrap();
        let dn = energy_per_particle(z - h, 0.0, lambda, tilt, n).unwrap();
        let fd = (up - dn) / (2.0 * h);
        prop_assert!((fd - stationarity(z, lambda, tilt)).abs() < 1e-6);
    }

    #[test]
    fn z_min_is_independent_of_n(lambda in 0.0f64..4.0, tilt in 0.0f64..0.2) {
        let a = z_min(lambda, tilt, 10).unwrap().z;
        let b = z_min(lambda, tilt, 5000).unwrap().z;
        prop_assert_eq!(a, b);
    }
}

#[test]
fn roots_match_dense_sign_scan() {
    let f = |z: f64| stationarity(z, 2.5, 1e-3);
    let edge = 1.0 - BOUNDARY_MARGIN;
    let m = 1_000_000;
    let mut oracle = Vec::new();
    let mut prev = (-edge, f(-edge));
    for i in 1..=m {
        let z = -edge + 2.0 * edge * i as f64 / m as f64;
        let v = f(z);
        if prev.1.signum() != v.signum() {
            oracle.push(0.5 * (prev.0 + z));
        }
        prev = (z, v);
    }
    let roots = stationary_z(2.5, 1e-3).unwrap();
    assert_eq!(roots.len(), oracle.len());
    assert_eq!(roots.len(), 3);
    for (r, o) in roots.iter().zip(&oracle) {
        assert!((r - o).abs() < 2.0 * edge / m as f64);
        assert!(f(*r).abs() < 1e-9);
    }
}

#[test]
fn z_min_grows_with_tilt() {
    for lambda in [0.5, 1.5, 2.1, 3.0] {
        let mut last = -1.0;
        for tilt in [0.0, 1e-6, 1e-4, 1e-2, 0.1, 0.5] {
            let z = z_min(lambda, tilt, 100).unwrap().z;
            assert!(z >= last - 1e-12, "λ={lambda} V0={tilt}: {z} < {last}");
            last = z;
        }
    }
}

#[test]
fn z_min_is_global_minimum_on_grid() {
    for (lambda, tilt) in [(1.0, 1e-3), (2.5, 1e-3), (3.5, 0.05)] {
        let best = z_min(lambda, tilt, 800).unwrap();
        for i in 1..2000 {
            let z = -1.0 + i as f64 / 1000.0;
            let e = energy_per_particle(z, 0.0, lambda, tilt, 800).unwrap();
            assert!(e >= best.energy_per_particle - 1e-12);
        }
    }
}

#[test]
fn below_threshold_z_min_vanishes_without_tilt() {
    for i in 0..=19 {
        let lambda = 0.1 * i as f64;
        assert!(z_min(lambda, 0.0, 100).unwrap().z.abs() < 1e-12);
    }
}

#[test]
fn large_tilt_has_no_transition() {
    for tilt in [0.1, 0.3] {
        let lc = critical_lambda(tilt, 800, DEFAULT_RESOLUTION, DEFAULT_JUMP_THRESHOLD).unwrap();
        assert_eq!(lc, None);
    }
    let lc = critical_lambda(0.0, 800, DEFAULT_RESOLUTION, DEFAULT_JUMP_THRESHOLD).unwrap();
    assert!(lc.is_some_and(|l| (l - 2.0).abs() < 0.05));
}
