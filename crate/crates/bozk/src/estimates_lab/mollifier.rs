//! Rates of the Fourier mollifier `phi_lambda`:
//! `||phi_lambda||_{E^{s+d}} <~ lambda^{-d} ||phi||_{E^s}` and
//! `||phi_lambda - phi||_{E^{s-d}} = o(lambda^d)`, measured on random data.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::sweep::{FitTarget, SweepPoint, SweepResult};
use crate::error::{BozkError, Result};
use crate::lp_toolkit::{es_norm, japanese};
use crate::rng::substream;
use crate::spectral_core::{abs_pow, mollify, DispersionParams, Grid2D, SpectralField2D};

/// Extra decay beyond the borderline `E^s` profile.
pub const MOLLIFIER_DATA_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct MollifierReport {
    /// `||phi_lambda||_{E^{s+d}} / ||phi||_{E^s}` against `lambda`; bound `lambda^{-d}`.
    pub smoothing: SweepResult,
    /// `||phi_lambda - phi||_{E^{s-d}} / (lambda^d ||phi||_{E^s})` against `lambda`.
    pub approximation: SweepResult,
    /// The approximation ratio decreases as `lambda` decreases.
    pub approximation_monotone: bool,
}

/// `n x n` lattice with frequency spacing `1/4` in both directions.
pub fn mollifier_grid(n: usize) -> Result<Grid2D> {
    let l = 8.0 * std::f64::consts::PI;
    Grid2D::new(n, n, l, l)
}

/// Random real data with `|phi_hat|^2 <X>^{2s} ~ <X>^{-(1/alpha + 1/2) - 2 margin}`,
/// `X = |xi|^alpha + mu^2`: each dyadic shell in `X` carries comparable `E^s` mass.
pub fn mollifier_data(grid: Grid2D, s: f64, p: &DispersionParams, seed: u64) -> Result<SpectralField2D> {
    let mut rng = substream(seed, 0);
    let decay = -(1.0 / p.alpha() + 0.5) / 2.0 - MOLLIFIER_DATA_MARGIN;
    let (nx, ny) = grid.shape();
    let mut f = SpectralField2D::zeros(grid, true);
    for j in 0..nx {
        for k in 0..ny {
            let (jn, kn) = ((nx - j) % nx, (ny - k) % ny);
            if (jn, kn) < (j, k) || j == nx / 2 || k == ny / 2 {
                continue;
            }
            let (xi, mu) = (grid.xi_at(j), grid.mu_at(k));
            let x = japanese(abs_pow(xi, p.alpha()) + mu * mu);
            let amp = x.powf(-s + decay);
            let g: f64 = rng.sample(StandardNormal);
            let h: f64 = rng.sample(StandardNormal);
            let c = if (jn, kn) == (j, k) {
                Complex64::new(g * amp, 0.0)
            } else {
                Complex64::new(g, h) * (amp / std::f64::consts::SQRT_2)
            };
            f.coeffs[[j, k]] = c;
            f.coeffs[[jn, kn]] = c.conj();
        }
    }
    Ok(f)
}

pub fn mollifier_rates(
    p: &DispersionParams,
    s: f64,
    delta: f64,
    lambdas: &[f64],
    n: usize,
    seed: u64,
) -> Result<MollifierReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(BozkError::InvalidParameter(format!("delta = {delta} must be > 0")));
    }
    if lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(BozkError::InvalidParameter("lambda values must be > 0".into()));
    }
    let grid = mollifier_grid(n)?;
    let phi = mollifier_data(grid, s, p, seed)?;
    let base = es_norm(&phi, s, p);
    let mut smooth = Vec::with_capacity(lambdas.len());
    let mut approx = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let m = mollify(&phi, lam, p);
        let diff = m.axpy(-1.0, &phi)?;
        let params = vec![
            ("alpha".to_string(), p.alpha()),
            ("s".to_string(), s),
            ("delta".to_string(), delta),
            ("lambda".to_string(), lam),
            ("n".to_string(), n as f64),
        ];
        smooth.push(SweepPoint::new(
            lam,
            params.clone(),
            es_norm(&m, s + delta, p) / base,
            lam.powf(-delta),
        ));
        approx.push(SweepPoint::new(lam, params, es_norm(&diff, s - delta, p) / (lam.powf(delta) * base), 1.0));
    }
    let smoothing = SweepResult::build("mollifier-smoothing", "lambda", smooth, FitTarget::Measured, false, vec![])?;
    let approximation =
        SweepResult::build("mollifier-approximation", "lambda", approx, FitTarget::Measured, false, vec![])?;
    let approximation_monotone = approximation.points.windows(2).all(|w| w[0].measured < w[1].measured);
    Ok(MollifierReport {
        smoothing,
        approximation,
        approximation_monotone,
    })
}
