use ndarray::{Array2, Zip};
use num_complex::Complex64;

use super::config::SimConfig;
use crate::error::{BozkError, Result};
use crate::lp_toolkit::{es_norm, norms_internal};
use crate::spectral_core::{
    eval_omega, inverse_transform_complex, transform, DispersionParams, Grid2D, RealField2D,
    SpectralField2D,
};

/// Abort when `||u||_inf` exceeds this multiple of its initial value.
pub const BLOWUP_FACTOR: f64 = 1e6;

/// Retained entries of the 2/3 rule: `|kx| <= nx/3` and `|ky| <= ny/3`.
pub fn dealias_mask(g: &Grid2D) -> Array2<bool> {
    let (cx, cy) = (g.nx() as f64 / 3.0, g.ny() as f64 / 3.0);
    Array2::from_shape_fn(g.shape(), |(j, k)| {
        (g.kx(j).abs() as f64) <= cx && (g.ky(k).abs() as f64) <= cy
    })
}

/// Zeroes all coefficients with `|j| > nx/3` or `|k| > ny/3`.
pub fn dealias(field: &SpectralField2D) -> SpectralField2D {
    let mask = dealias_mask(&field.grid);
    let mut out = field.clone();
    Zip::from(&mut out.coeffs).and(&mask).for_each(|c, &m| {
        if !m {
            *c = Complex64::new(0.0, 0.0);
        }
    });
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Monitor {
    pub t: f64,
    pub mass: f64,
    pub hamiltonian: f64,
    /// `E^s` norms at the configured `s` values.
    pub es: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField2D>,
    pub monitors: Vec<Monitor>,
    pub monitor_s: Vec<f64>,
}

struct Stepper {
    grid: Grid2D,
    omega: Array2<f64>,
    half_ixi: Array2<Complex64>,
    mask: Option<Array2<bool>>,
    nonlinear: bool,
}

impl Stepper {
    fn new(grid: Grid2D, p: &DispersionParams, dealias: bool, nonlinear: bool) -> Self {
        let omega = Array2::from_shape_fn(grid.shape(), |(j, k)| {
            eval_omega(grid.xi_at(j), grid.mu_at(k), p)
        });
        let half_ixi =
            Array2::from_shape_fn(grid.shape(), |(j, _)| Complex64::new(0.0, 0.5 * grid.xi_at(j)));
        Self {
            grid,
            omega,
            half_ixi,
            mask: dealias.then(|| dealias_mask(&grid)),
            nonlinear,
        }
    }

    fn phase(&self, t: f64) -> Array2<Complex64> {
        self.omega.mapv(|w| Complex64::from_polar(1.0, t * w))
    }

    fn apply_mask(&self, a: &mut Array2<Complex64>) {
        if let Some(m) = &self.mask {
            Zip::from(a).and(m).for_each(|c, &keep| {
                if !keep {
                    *c = Complex64::new(0.0, 0.0);
                }
            });
        }
    }

    /// `(i xi / 2) F(u^2)` with dealiasing, plus `||u||_inf`.
    fn nonlinearity(&self, uh: &Array2<Complex64>) -> Result<(Array2<Complex64>, f64)> {
        let mut v = uh.clone();
        self.apply_mask(&mut v);
        let field = SpectralField2D {
            coeffs: v,
            grid: self.grid,
            hermitian: true,
        };
        let u = inverse_transform_complex(&field)?.mapv(|z| z.re);
        let umax = u.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        let sq = RealField2D {
            values: u.mapv(|x| x * x),
            grid: self.grid,
        };
        let mut n = transform(&sq)?.coeffs;
        Zip::from(&mut n).and(&self.half_ixi).for_each(|c, &f| *c *= f);
        self.apply_mask(&mut n);
        Ok((n, umax))
    }

    /// `F(t, w) = e^{-i t omega} N(e^{i t omega} w)`, given the phase `e^{i t omega}`.
    fn rhs(&self, ph: &Array2<Complex64>, w: &Array2<Complex64>) -> Result<(Array2<Complex64>, f64)> {
        let uh = w * ph;
        let (mut n, umax) = self.nonlinearity(&uh)?;
        Zip::from(&mut n).and(ph).for_each(|c, p| *c *= p.conj());
        Ok((n, umax))
    }

    /// One RK4 step of the interaction variable from `t` to `t + h`.
    /// Returns the new `w` and `||u(t)||_inf`.
    fn step(
        &self,
        t: f64,
        h: f64,
        w: &Array2<Complex64>,
        ph_t: &Array2<Complex64>,
        ph_end: &Array2<Complex64>,
    ) -> Result<(Array2<Complex64>, f64)> {
        let ph_mid = self.phase(t + 0.5 * h);
        let (k1, umax) = self.rhs(ph_t, w)?;
        let (k2, _) = self.rhs(&ph_mid, &(w + &k1.mapv(|c| c * (0.5 * h))))?;
        let (k3, _) = self.rhs(&ph_mid, &(w + &k2.mapv(|c| c * (0.5 * h))))?;
        let (k4, _) = self.rhs(ph_end, &(w + &k3.mapv(|c| c * h)))?;
        let mut out = w.clone();
        let c = h / 6.0;
        Zip::from(&mut out)
            .and(&k1)
            .and(&k2)
            .and(&k3)
            .for_each(|o, a, b, d| *o += (a + 2.0 * b + 2.0 * d) * c);
        Zip::from(&mut out).and(&k4).for_each(|o, d| *o += d * c);
        Ok((out, umax))
    }
}

/// Advances `u0` (given at time `t0`) by `steps` steps of signed size `dt`,
/// invoking `observe(n, t, u_hat)` after every step `n = 1..=steps` and once
/// for `n = 0`.
#[allow(clippy::too_many_arguments)]
pub fn evolve(
    u0: &SpectralField2D,
    t0: f64,
    dt: f64,
    steps: usize,
    p: &DispersionParams,
    dealias_on: bool,
    nonlinear: bool,
    mut observe: impl FnMut(usize, f64, &SpectralField2D) -> Result<()>,
) -> Result<SpectralField2D> {
    let st = Stepper::new(u0.grid, p, dealias_on, nonlinear);
    let mut start = u0.coeffs.clone();
    st.apply_mask(&mut start);
    let init = SpectralField2D {
        coeffs: start,
        grid: u0.grid,
        hermitian: true,
    };
    observe(0, t0, &init)?;
    // Interaction variable relative to t0: u_hat(t) = e^{i (t - t0) omega} w.
    let mut w = init.coeffs.clone();
    let mut umax0 = None;
    let mut last_valid = t0;
    let mut state = init;
    let mut ph = st.phase(0.0);
    for n in 1..=steps {
        let s_prev = (n - 1) as f64 * dt;
        let s_now = n as f64 * dt;
        let ph_next = st.phase(s_now);
        if st.nonlinear {
            let (w_new, umax) = st.step(s_prev, dt, &w, &ph, &ph_next)?;
            let reference = *umax0.get_or_insert(umax);
            if !umax.is_finite() || (reference > 0.0 && umax > BLOWUP_FACTOR * reference) {
                return Err(BozkError::Diverged {
                    last_valid_time: last_valid,
                });
            }
            w = w_new;
        }
        if w.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(BozkError::Diverged {
                last_valid_time: last_valid,
            });
        }
        state = SpectralField2D {
            coeffs: &w * &ph_next,
            grid: u0.grid,
            hermitian: true,
        };
        ph = ph_next;
        last_valid = t0 + s_now;
        observe(n, t0 + s_now, &state)?;
    }
    Ok(state)
}

fn monitor(t: f64, uh: &SpectralField2D, s_values: &[f64], p: &DispersionParams) -> Result<Monitor> {
    let u = RealField2D {
        values: inverse_transform_complex(uh)?.mapv(|z| z.re),
        grid: uh.grid,
    };
    let c = norms_internal::conserved_from_parts(&u, uh, p);
    Ok(Monitor {
        t,
        mass: c.mass,
        hamiltonian: c.hamiltonian,
        es: s_values.iter().map(|&s| es_norm(uh, s, p)).collect(),
    })
}

/// Runs a configured simulation, storing states and monitors every
/// `monitor_stride` steps and at the final time.
pub fn simulate(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let steps = cfg.steps()?;
    let u0 = cfg.initial_field()?;
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        monitors: Vec::new(),
        monitor_s: cfg.monitor_s.clone(),
    };
    let p = cfg.params;
    evolve(&u0, 0.0, cfg.dt, steps, &p, cfg.dealias, cfg.nonlinear, |n, t, uh| {
        if n % cfg.monitor_stride == 0 || n == steps {
            traj.monitors.push(monitor(t, uh, &cfg.monitor_s, &p)?);
            traj.times.push(t);
            traj.states.push(uh.clone());
        }
        Ok(())
    })?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::config::{InitialData, Preset};
    use crate::spectral_core::{inverse_transform, propagate};
    use std::f64::consts::PI;

    fn gaussian(g: Grid2D, amp: f64, sx: f64, sy: f64) -> SpectralField2D {
        let (cx, cy) = (g.lx() / 2.0, g.ly() / 2.0);
        let f = RealField2D::from_fn(g, |x, y| {
            amp * (-0.5 * (((x - cx) / sx).powi(2) + ((y - cy) / sy).powi(2))).exp()
        });
        dealias(&transform(&f).unwrap())
    }

    fn rel_diff(a: &SpectralField2D, b: &SpectralField2D) -> f64 {
        a.axpy(-1.0, b).unwrap().l2_norm() / b.l2_norm()
    }

    fn run(u0: &SpectralField2D, dt: f64, steps: usize, p: &DispersionParams, nonlinear: bool) -> SpectralField2D {
        evolve(u0, 0.0, dt, steps, p, true, nonlinear, |_, _, _| Ok(())).unwrap()
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = Grid2D::new(32, 32, 2.0 * PI, 2.0 * PI).unwrap();
        let p = DispersionParams::new(1.5).unwrap();
        let cfg = SimConfig::new(g, p, 1e-3, 0.05, InitialData::Preset(Preset::Zero));
        let tr = simulate(&cfg).unwrap();
        assert_eq!(tr.states.len(), 51);
        assert!(tr.states.iter().all(|s| s.max_abs() == 0.0));
        assert!(tr.monitors.iter().all(|m| m.mass == 0.0 && m.hamiltonian == 0.0));
    }

    #[test]
    fn linear_regime_matches_propagator() {
        // The relative departure from the linear flow is first order in the
        // amplitude, so it is checked at two amplitudes.
        let g = Grid2D::new(64, 64, 8.0 * PI, 8.0 * PI).unwrap();
        let p = DispersionParams::new(2.0).unwrap();
        let dev = |amp: f64| {
            let u0 = gaussian(g, amp, 1.0, 1.0);
            rel_diff(&run(&u0, 1e-2, 100, &p, true), &propagate(&u0, 1.0, &p))
        };
        let (d8, d10) = (dev(1e-8), dev(1e-10));
        assert!(d10 < 1e-10, "{d10:e}");
        assert!((d8 / d10 / 100.0 - 1.0).abs() < 1e-2, "{d8:e} {d10:e}");
    }

    #[test]
    fn linear_flow_exact_for_any_dt() {
        let g = Grid2D::new(32, 64, 4.0 * PI, 8.0 * PI).unwrap();
        let p = DispersionParams::new(1.0).unwrap();
        let u0 = gaussian(g, 1.0, 0.8, 1.2);
        let exact = propagate(&u0, 0.6, &p);
        for (dt, n) in [(0.3, 2), (0.01, 60), (0.6, 1)] {
            assert!(rel_diff(&run(&u0, dt, n, &p, false), &exact) < 1e-13);
        }
    }

    #[test]
    fn time_reversal_returns_initial_data() {
        let g = Grid2D::new(64, 64, 8.0 * PI, 8.0 * PI).unwrap();
        let p = DispersionParams::new(1.5).unwrap();
        let u0 = gaussian(g, 0.5, 0.8, 0.8);
        let fwd = run(&u0, 1e-3, 200, &p, true);
        let back = evolve(&fwd, 0.2, -1e-3, 200, &p, true, true, |_, _, _| Ok(())).unwrap();
        assert!(rel_diff(&back, &u0) < 1e-7);
    }

    #[test]
    fn rk4_observed_order() {
        let g = Grid2D::new(64, 64, 4.0 * PI, 4.0 * PI).unwrap();
        let p = DispersionParams::new(2.0).unwrap();
        let u0 = gaussian(g, 4.0, 0.6, 0.6);
        let t = 0.2;
        let sols: Vec<_> = [2e-3, 1e-3, 5e-4]
            .iter()
            .map(|&dt| run(&u0, dt, (t / dt as f64).round() as usize, &p, true))
            .collect();
        let d1 = sols[0].axpy(-1.0, &sols[1]).unwrap().l2_norm();
        let d2 = sols[1].axpy(-1.0, &sols[2]).unwrap().l2_norm();
        let order = (d1 / d2).log2();
        assert!(order >= 3.8, "order {order}, d1 {d1:e}, d2 {d2:e}");
    }

    #[test]
    fn dealias_keeps_retained_box_and_kills_nyquist() {
        let g = Grid2D::new(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let inside = SpectralField2D::from_fn(g, false, |xi, mu| {
            if xi.abs() <= 5.0 && mu.abs() <= 5.0 {
                Complex64::new(xi + 0.3, mu - 0.1)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert_eq!(dealias(&inside), inside);
        let nyq = SpectralField2D::from_fn(g, true, |xi, mu| {
            Complex64::new(if xi == -8.0 || mu == -8.0 { 1.0 } else { 0.0 }, 0.0)
        });
        assert_eq!(dealias(&nyq).max_abs(), 0.0);
    }

    #[test]
    fn dealiased_product_is_linear_convolution() {
        let g = Grid2D::new(16, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let mut rng = crate::rng::rng_from_seed(3);
        use rand::Rng;
        let mut random_real = || {
            let f = RealField2D::from_fn(g, |_, _| 0.0);
            let v = f.values.mapv(|_| rng.random::<f64>() - 0.5);
            dealias(&transform(&RealField2D::new(g, v).unwrap()).unwrap())
        };
        let (a, b) = (random_real(), random_real());
        let ua = inverse_transform(&a).unwrap();
        let ub = inverse_transform(&b).unwrap();
        let prod = RealField2D::new(g, &ua.values * &ub.values).unwrap();
        let got = dealias(&transform(&prod).unwrap());
        let norm = g.freq_cell_area() / (2.0 * PI);
        let mask = dealias_mask(&g);
        let mut worst: f64 = 0.0;
        for j in 0..16 {
            for k in 0..16 {
                let mut acc = Complex64::new(0.0, 0.0);
                for j1 in 0..16 {
                    for k1 in 0..16 {
                        let (m1, n1) = (g.kx(j1), g.ky(k1));
                        let (m2, n2) = (g.kx(j) - m1, g.ky(k) - n1);
                        if let (Some(j2), Some(k2)) = (g.index_x(m2), g.index_y(n2)) {
                            acc += a.coeffs[[j1, k1]] * b.coeffs[[j2, k2]];
                        }
                    }
                }
                let want = if mask[[j, k]] { acc * norm } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((got.coeffs[[j, k]] - want).norm());
            }
        }
        assert!(worst < 1e-12, "{worst:e}");
    }
}
