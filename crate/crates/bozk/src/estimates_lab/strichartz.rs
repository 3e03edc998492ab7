//! Mixed-norm sweeps for `||P_N^x [P_{A_delta^c}] U(t) phi||_{L^q_t L^p_{xy}} / ||phi||_{L^2}`.
//!
//! Each `N` works on the anisotropically dilated box: frequencies
//! `xi = N xi'`, `mu = N^{alpha/2} mu'`, time `t = N^{-(alpha+1)} t'`, so the
//! same number of grid points resolves every `N`. Data are random
//! superpositions of wave packets with a fixed profile in `(xi', mu')`
//! that sits where the projections equal 1.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::sweep::{FitTarget, SweepPoint, SweepResult};
use crate::error::{BozkError, Result};
use crate::lp_toolkit::{chi, mixed_norm_abs, project, rho_delta, smoothstep, DyadicIndex, Projection};
use crate::rng::substream;
use crate::spectral_core::{
    abs_pow, inverse_transform_complex, propagate, DispersionParams, Grid2D, SpectralField2D,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrichartzMode {
    /// With `P_{A_delta^c}`; `1/q = theta (1 - eps) / 2`, `1/p = (1 - theta) / 2`.
    Localized,
    /// Without it; `1/q = 5 theta / 12`, `1/p = (1 - theta) / 2`.
    Global,
}

impl std::str::FromStr for StrichartzMode {
    type Err = BozkError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "localized" => Ok(Self::Localized),
            "global" => Ok(Self::Global),
            _ => Err(BozkError::InvalidParameter(format!(
                "unknown Strichartz mode '{s}' (expected localized or global)"
            ))),
        }
    }
}

/// Grid and window in dilated units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrichartzSetup {
    pub nx: usize,
    pub ny: usize,
    /// Box lengths `(lx', ly')`.
    pub box_len: (f64, f64),
    /// Window `|t'| <= window`.
    pub window: f64,
    /// Number of time samples (odd, includes `t = 0`).
    pub samples: usize,
    /// Wave packets per datum.
    pub packets: usize,
    /// `mu'` cutoff radius of the data profile.
    pub mu_cut: f64,
}

impl Default for StrichartzSetup {
    fn default() -> Self {
        Self {
            nx: 256,
            ny: 128,
            box_len: (128.0, 64.0),
            window: 2.0,
            samples: 129,
            packets: 3,
            mu_cut: 1.5,
        }
    }
}

/// Exponents `(q, p)` for the mode; `f64::INFINITY` when the reciprocal is 0.
pub fn strichartz_exponents(mode: StrichartzMode, theta: f64, epsilon: f64) -> Result<(f64, f64)> {
    let ok = match mode {
        StrichartzMode::Localized => (0.0..1.0).contains(&theta),
        StrichartzMode::Global => (0.0..=1.0).contains(&theta),
    };
    if !ok {
        return Err(BozkError::InvalidParameter(format!(
            "theta = {theta} outside the admissible range for {mode:?}"
        )));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(BozkError::InvalidParameter(format!("epsilon = {epsilon} must lie in [0, 1)")));
    }
    let inv_q = match mode {
        StrichartzMode::Localized => theta * (1.0 - epsilon) / 2.0,
        StrichartzMode::Global => 5.0 * theta / 12.0,
    };
    let inv_p = (1.0 - theta) / 2.0;
    let inv = |r: f64| if r == 0.0 { f64::INFINITY } else { 1.0 / r };
    Ok((inv(inv_q), inv(inv_p)))
}

/// Claimed growth exponent of the bound in `N`.
pub fn strichartz_exponent(mode: StrichartzMode, theta: f64, epsilon: f64, alpha: f64) -> f64 {
    match mode {
        StrichartzMode::Localized => theta * (epsilon * (alpha + 1.0) - alpha / 4.0),
        StrichartzMode::Global => -(theta / 6.0) * (alpha - 0.5),
    }
}

/// Exponent picked up by `||U(t) phi||_{L^q_t L^p_{xy}} / ||phi||_{L^2}` when
/// the data are dilated to frequency `N`: `(1 + alpha/2)(1/2 - 1/p) - (alpha + 1)/q`.
pub fn dilation_exponent(q: f64, pexp: f64, alpha: f64) -> f64 {
    (1.0 + alpha / 2.0) * (0.5 - 1.0 / pexp) - (alpha + 1.0) / q
}

/// Smooth bump on `[5/6, 4/3]` (where `varphi = 1`), vanishing at the ends.
fn xi_profile(x: f64) -> f64 {
    const LO: f64 = 5.0 / 6.0;
    const HI: f64 = 4.0 / 3.0;
    const W: f64 = 0.125;
    smoothstep((x - LO) / W) * smoothstep((HI - x) / W)
}

fn data_profile(mode: StrichartzMode, xs: f64, ms: f64, delta: f64, mu_cut: f64, p: &DispersionParams) -> f64 {
    if xs <= 0.0 {
        return 0.0;
    }
    let base = xi_profile(xs) * chi(ms / mu_cut);
    match mode {
        StrichartzMode::Global => base,
        // rho_{2 delta} vanishes wherever rho_delta < 1.
        StrichartzMode::Localized => base * rho_delta(p.b() - ms * ms / abs_pow(xs, p.alpha()), 2.0 * delta),
    }
}

/// One random unit-`L^2` datum on the dilated grid for `N`.
pub fn strichartz_datum(
    mode: StrichartzMode,
    n: DyadicIndex,
    delta: f64,
    p: &DispersionParams,
    setup: &StrichartzSetup,
    rng: &mut impl Rng,
) -> Result<SpectralField2D> {
    let (sx, sy) = (n.as_f64(), n.as_f64().powf(p.alpha() / 2.0));
    let grid = Grid2D::new(setup.nx, setup.ny, setup.box_len.0 / sx, setup.box_len.1 / sy)?;
    let packets: Vec<(Complex64, f64, f64)> = (0..setup.packets)
        .map(|_| {
            let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            (c, rng.random::<f64>() * grid.lx(), rng.random::<f64>() * grid.ly())
        })
        .collect();
    let half = |xi: f64, mu: f64| -> Complex64 {
        let w = data_profile(mode, xi / sx, mu / sy, delta, setup.mu_cut, p);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        packets
            .iter()
            .map(|(c, x0, y0)| c * Complex64::from_polar(1.0, -(xi * x0 + mu * y0)))
            .sum::<Complex64>()
            * w
    };
    let f = SpectralField2D::from_fn(grid, true, |xi, mu| {
        if xi > 0.0 {
            half(xi, mu)
        } else if xi < 0.0 {
            half(-xi, -mu).conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let norm = f.l2_norm();
    if norm == 0.0 {
        return Err(BozkError::Unresolvable("data profile misses every grid frequency".into()));
    }
    Ok(f.scale(1.0 / norm))
}

/// `||P U(t) phi||_{L^q_t L^p_{xy}} / ||phi||_{L^2}` over the sampled window.
pub fn strichartz_ratio(
    mode: StrichartzMode,
    phi: &SpectralField2D,
    n: DyadicIndex,
    delta: f64,
    q: f64,
    pexp: f64,
    p: &DispersionParams,
    setup: &StrichartzSetup,
) -> Result<f64> {
    let mut f = project(phi, Projection::PNx(n), p)?;
    if mode == StrichartzMode::Localized {
        f = project(&f, Projection::PNonresonant(delta), p)?;
    }
    let t_max = setup.window * n.as_f64().powf(-(p.alpha() + 1.0));
    let m = setup.samples;
    let dt = 2.0 * t_max / (m - 1) as f64;
    let frames: Vec<Array2<f64>> = (0..m)
        .map(|i| {
            let t = -t_max + i as f64 * dt;
            inverse_transform_complex(&propagate(&f, t, p)).map(|a| a.mapv(|z| z.norm()))
        })
        .collect::<Result<_>>()?;
    let mixed = mixed_norm_abs(&frames, phi.grid.cell_area(), dt, q, pexp)?;
    Ok(mixed / phi.l2_norm())
}

/// Per-`N` maximum ratio over `trials` random data, fitted in `N`.
#[allow(clippy::too_many_arguments)]
pub fn strichartz_sweep(
    mode: StrichartzMode,
    p: &DispersionParams,
    theta: f64,
    epsilon: f64,
    delta: f64,
    ns: &[DyadicIndex],
    trials: usize,
    seed: u64,
    setup: &StrichartzSetup,
) -> Result<SweepResult> {
    let (q, pexp) = strichartz_exponents(mode, theta, epsilon)?;
    Projection::PNonresonant(delta).validate()?;
    if trials == 0 {
        return Err(BozkError::InvalidParameter("trials must be >= 1".into()));
    }
    if setup.samples < 3 || setup.samples % 2 == 0 {
        return Err(BozkError::InvalidParameter("time samples must be odd and >= 3".into()));
    }
    let expo = strichartz_exponent(mode, theta, epsilon, p.alpha());
    let mut points = Vec::with_capacity(ns.len());
    for &n in ns {
        let ratios: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = substream(seed, ((n.exp() as u64) << 32) | trial as u64);
                let phi = strichartz_datum(mode, n, delta, p, setup, &mut rng)?;
                strichartz_ratio(mode, &phi, n, delta, q, pexp, p, setup)
            })
            .collect::<Result<_>>()?;
        let best = ratios.iter().copied().fold(0.0, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let params = vec![
            ("alpha".to_string(), p.alpha()),
            ("theta".to_string(), theta),
            ("epsilon".to_string(), epsilon),
            ("delta".to_string(), delta),
            ("N".to_string(), n.as_f64()),
            ("q".to_string(), q),
            ("p".to_string(), pexp),
            ("dilation_exponent".to_string(), dilation_exponent(q, pexp, p.alpha())),
            ("t_max".to_string(), setup.window * n.as_f64().powf(-(p.alpha() + 1.0))),
            ("trials".to_string(), trials as f64),
            ("min_ratio".to_string(), min),
        ];
        points.push(SweepPoint::new(n.as_f64(), params, best, n.as_f64().powf(expo)));
    }
    let name = match mode {
        StrichartzMode::Localized => "strichartz-localized",
        StrichartzMode::Global => "strichartz-global",
    };
    SweepResult::build(
        name,
        "N",
        points,
        FitTarget::Measured,
        false,
        vec![format!(
            "window |t| <= {} N^-(alpha+1), {} samples; dilated box {:?} on {}x{}; {} packets",
            setup.window, setup.samples, setup.box_len, setup.nx, setup.ny, setup.packets
        )],
    )
}

/// Total `L^2` mass of the profile outside the region where the
/// projections equal 1 (zero by construction; exposed for tests).
pub fn profile_leak(mode: StrichartzMode, delta: f64, p: &DispersionParams, mu_cut: f64) -> f64 {
    let mut leak = 0.0;
    let steps = 400;
    for i in 0..steps {
        let xs = 0.5 + 1.5 * (i as f64 + 0.5) / steps as f64;
        for j in 0..steps {
            let ms = -3.0 * mu_cut + 6.0 * mu_cut * (j as f64 + 0.5) / steps as f64;
            let w = data_profile(mode, xs, ms, delta, mu_cut, p);
            let nx = crate::lp_toolkit::varphi(xs);
            let na = if mode == StrichartzMode::Localized {
                rho_delta(p.b() - ms * ms / abs_pow(xs, p.alpha()), delta)
            } else {
                1.0
            };
            leak += (w * (1.0 - nx * na)).powi(2);
        }
    }
    leak * (1.5 / steps as f64) * (6.0 * mu_cut / steps as f64) / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> StrichartzSetup {
        StrichartzSetup {
            nx: 128,
            ny: 64,
            box_len: (96.0, 48.0),
            window: 2.0,
            samples: 17,
            packets: 2,
            mu_cut: 1.5,
        }
    }

    fn d(v: u64) -> DyadicIndex {
        DyadicIndex::new(v).unwrap()
    }

    #[test]
    fn exponents() {
        let (q, p) = strichartz_exponents(StrichartzMode::Localized, 0.0, 0.1).unwrap();
        assert!(q.is_infinite() && p == 2.0);
        let eps = 0.1;
        let th = 1.0 / (2.0 - eps);
        let (q, p) = strichartz_exponents(StrichartzMode::Localized, th, eps).unwrap();
        // q = p = 2 (2 - eps) / (1 - eps), which tends to 4 as eps -> 0.
        let want = 2.0 * (2.0 - eps) / (1.0 - eps);
        assert!((q - want).abs() < 1e-12 && (p - want).abs() < 1e-12);
        let (q, p) = strichartz_exponents(StrichartzMode::Global, 0.5, 0.0).unwrap();
        assert!((q - 4.8).abs() < 1e-12 && (p - 4.0).abs() < 1e-12);
        assert!(strichartz_exponents(StrichartzMode::Localized, 1.0, 0.1).is_err());
        assert!(strichartz_exponents(StrichartzMode::Global, 1.0, 0.0).unwrap().1.is_infinite());
        assert!((strichartz_exponent(StrichartzMode::Global, 0.5, 0.0, 1.0) + 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn profile_inside_unit_region() {
        for &a in &[1.0, 1.5, 2.0] {
            let p = DispersionParams::new(a).unwrap();
            for mode in [StrichartzMode::Localized, StrichartzMode::Global] {
                assert_eq!(profile_leak(mode, 0.1, &p, 1.5), 0.0);
            }
        }
    }

    #[test]
    fn theta_zero_is_unitary() {
        let p = DispersionParams::new(1.5).unwrap();
        let r = strichartz_sweep(StrichartzMode::Localized, &p, 0.0, 0.1, 0.1, &[d(4), d(16)], 2, 9, &small())
            .unwrap();
        for pt in &r.points {
            assert!((pt.measured - 1.0).abs() < 1e-12, "{}", pt.measured);
            let min = pt.params.iter().find(|(k, _)| k == "min_ratio").unwrap().1;
            assert!((min - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dilation_makes_ratio_a_power_law() {
        // Same stream for both N: the data are dilates of each other, so the
        // ratio moves by exactly N^{exponent}.
        let p = DispersionParams::new(1.0).unwrap();
        let s = small();
        let (eps, th) = (0.1, 0.5);
        let (q, pe) = strichartz_exponents(StrichartzMode::Localized, th, eps).unwrap();
        let r: Vec<f64> = [d(4), d(32)]
            .iter()
            .map(|&n| {
                let mut rng = substream(1, 0);
                let phi = strichartz_datum(StrichartzMode::Localized, n, 0.1, &p, &s, &mut rng).unwrap();
                strichartz_ratio(StrichartzMode::Localized, &phi, n, 0.1, q, pe, &p, &s).unwrap()
            })
            .collect();
        let slope = (r[1] / r[0]).ln() / 8f64.ln();
        let want = dilation_exponent(q, pe, 1.0);
        assert!((slope - want).abs() < 1e-9, "{slope} vs {want}");
        assert!(want <= strichartz_exponent(StrichartzMode::Localized, th, eps, 1.0));
    }

    #[test]
    fn datum_is_real_and_unit() {
        let p = DispersionParams::new(2.0).unwrap();
        let mut rng = substream(3, 0);
        let phi = strichartz_datum(StrichartzMode::Global, d(8), 0.1, &p, &small(), &mut rng).unwrap();
        assert!(phi.hermitian_defect() < 1e-14);
        assert!((phi.l2_norm() - 1.0).abs() < 1e-12);
    }
}
