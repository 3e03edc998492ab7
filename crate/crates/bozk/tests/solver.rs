use std::f64::consts::PI;

use bozk::solver::{
    read_coefficients, scaled_solution_check, simulate, write_coefficients, InitialData, Preset, SimConfig,
};
use bozk::spectral_core::{DispersionParams, Grid2D};

fn gaussian_config(alpha: f64, amplitude: f64, dt: f64, t_end: f64) -> SimConfig {
    let g = Grid2D::new(64, 64, 16.0 * PI, 16.0 * PI).unwrap();
    let p = DispersionParams::new(alpha).unwrap();
    let init = InitialData::Preset(Preset::Gaussian {
        amplitude,
        sigma_x: 1.0,
        sigma_y: 1.0,
    });
    let mut cfg = SimConfig::new(g, p, dt, t_end, init);
    cfg.monitor_stride = 10;
    cfg
}

#[test]
fn invariants_are_conserved() {
    for &a in &[1.0, 1.5, 2.0] {
        let tr = simulate(&gaussian_config(a, 0.5, 1e-2, 0.5)).unwrap();
        let (m0, h0) = (tr.monitors[0].mass, tr.monitors[0].hamiltonian);
        for m in &tr.monitors {
            assert!((m.mass - m0).abs() <= 1e-8 * m0, "alpha {a}: mass {} vs {m0}", m.mass);
            assert!((m.hamiltonian - h0).abs() <= 1e-6 * h0.abs(), "alpha {a}: H {} vs {h0}", m.hamiltonian);
        }
    }
}

#[test]
fn hamiltonian_drift_shrinks_with_dt() {
    let drift = |dt: f64| {
        let tr = simulate(&gaussian_config(2.0, 2.0, dt, 0.4)).unwrap();
        let h0 = tr.monitors[0].hamiltonian;
        tr.monitors.iter().map(|m| (m.hamiltonian - h0).abs()).fold(0.0, f64::max)
    };
    let (d1, d2) = (drift(2e-2), drift(1e-2));
    assert!(d1 / d2 >= 8.0, "{d1:e} {d2:e}");
}

#[test]
fn scaling_symmetry_holds() {
    for &a in &[1.0, 2.0] {
        let mut cfg = gaussian_config(a, 1e-6, 1e-2, 0.2);
        cfg.initial = InitialData::Preset(Preset::Gaussian {
            amplitude: 1e-6,
            sigma_x: 2.0,
            sigma_y: 2.0,
        });
        let r = scaled_solution_check(&cfg, 0.5, &[0.0, 0.5]).unwrap();
        assert!(r.discrepancy <= 1e-6, "alpha {a}: {}", r.discrepancy);
        for n in &r.norms {
            assert!(n.measured <= 1.1 * n.bound, "alpha {a} s {}", n.s);
        }
        let rel = (r.l2_exponent_measured - r.l2_exponent_predicted).abs() / r.l2_exponent_predicted.abs();
        assert!(rel <= 0.1);
    }
}

#[test]
fn final_state_roundtrips_through_binary_format() {
    let cfg = gaussian_config(1.5, 0.5, 1e-2, 0.1);
    let tr = simulate(&cfg).unwrap();
    let last = tr.states.last().unwrap();
    let mut buf = Vec::new();
    write_coefficients(&mut buf, last, 1.5).unwrap();
    let (back, alpha) = read_coefficients(&mut buf.as_slice()).unwrap();
    assert_eq!(alpha, 1.5);
    assert_eq!(&back, last);

    let mut again = cfg.clone();
    again.initial = InitialData::Coefficients(back);
    let tr2 = simulate(&again).unwrap();
    assert!(tr2.states[0].axpy(-1.0, last).unwrap().max_abs() == 0.0);
}
