mod common;

use std::f64::consts::PI;

use bozk::spectral_core::{inverse_transform, propagate, transform, DispersionParams, Grid2D};
use common::{band_limited, max_diff};
use proptest::prelude::*;

fn grid() -> Grid2D {
    Grid2D::new(32, 32, 4.0 * PI, 2.0 * PI).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagator_is_unitary(seed in 0u64..1_000_000, t in -50.0f64..50.0, alpha in 1.0f64..=2.0) {
        let p = DispersionParams::new(alpha).unwrap();
        let f = band_limited(grid(), 16, seed);
        let u = propagate(&f, t, &p);
        prop_assert!((u.l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn group_law(seed in 0u64..1_000_000, t in -1.0f64..1.0, s in -1.0f64..1.0, alpha in 1.0f64..=2.0) {
        let p = DispersionParams::new(alpha).unwrap();
        let f = band_limited(grid(), 16, seed);
        let two = propagate(&propagate(&f, s, &p), t, &p);
        let one = propagate(&f, t + s, &p);
        prop_assert!(max_diff(&two, &one) <= 1e-12 * f.max_abs());
    }

    #[test]
    fn propagation_preserves_reality(seed in 0u64..1_000_000, t in -10.0f64..10.0, alpha in 1.0f64..=2.0) {
        let p = DispersionParams::new(alpha).unwrap();
        let u = propagate(&band_limited(grid(), 15, seed), t, &p);
        prop_assert!(u.hermitian_defect() <= 1e-14 * u.max_abs());
    }
}

#[test]
fn backward_propagation_inverts_forward() {
    let p = DispersionParams::new(1.3).unwrap();
    let f = band_limited(grid(), 16, 9);
    let back = propagate(&propagate(&f, 3.7, &p), -3.7, &p);
    assert!(max_diff(&back, &f) <= 1e-13 * f.max_abs());
}

#[test]
fn transform_roundtrip_through_propagation_at_zero() {
    let f = band_limited(grid(), 15, 2);
    let u = inverse_transform(&f).unwrap();
    let g = transform(&u).unwrap();
    let p = DispersionParams::new(2.0).unwrap();
    assert!(max_diff(&propagate(&g, 0.0, &p), &f) <= 1e-13 * f.max_abs());
}
