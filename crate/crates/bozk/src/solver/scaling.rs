use super::config::{InitialData, SimConfig};
use super::stepper::simulate;
use crate::error::{BozkError, Result};
use crate::lp_toolkit::es_norm;
use crate::spectral_core::{inverse_transform_complex, Grid2D, SpectralField2D};

#[derive(Debug, Clone, PartialEq)]
pub struct NormScaling {
    pub s: f64,
    /// `||u_lambda(0)||_{E^s} / ||u(0)||_{E^s}`.
    pub measured: f64,
    /// `lambda^{3/4 - 1/(2 alpha)} (1 + lambda^s)`.
    pub bound: f64,
    pub ratio_to_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub lambda: f64,
    /// Relative discrete `L^2` distance between the rescaled run and the
    /// rescaling of the base run, at the final matched time.
    pub discrepancy: f64,
    pub base_time: f64,
    pub scaled_time: f64,
    pub norms: Vec<NormScaling>,
    /// `log(||u_lambda(0)||_{L^2} / ||u(0)||_{L^2}) / log(lambda)`.
    pub l2_exponent_measured: f64,
    /// `3/4 - 1/(2 alpha)`.
    pub l2_exponent_predicted: f64,
}

/// Configuration of `u_lambda(t, x, y) = lambda u(lambda^{1+1/alpha} t, lambda^{1/alpha} x, lambda^{1/2} y)`:
/// box lengths `lambda^{-1/alpha} lx`, `lambda^{-1/2} ly`, time step and
/// horizon scaled by `lambda^{-(1+1/alpha)}`, and initial samples equal to
/// `lambda` times the base samples.
pub fn scaled_config(cfg: &SimConfig, lambda: f64) -> Result<SimConfig> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(BozkError::InvalidParameter(format!("lambda = {lambda} must be > 0")));
    }
    let a = cfg.params.alpha();
    let g = cfg.grid;
    let grid = Grid2D::new(
        g.nx(),
        g.ny(),
        lambda.powf(-1.0 / a) * g.lx(),
        lambda.powf(-0.5) * g.ly(),
    )?;
    let tscale = lambda.powf(-(1.0 + 1.0 / a));
    // Lattice index (j, k) keeps its meaning on the rescaled box, so the
    // rescaled coefficients are a constant multiple of the base ones.
    let base = cfg.initial_field()?;
    let init = SpectralField2D {
        coeffs: base.coeffs.mapv(|c| c * lambda.powf(0.5 - 1.0 / a)),
        grid,
        hermitian: base.hermitian,
    };
    let mut out = cfg.clone();
    out.grid = grid;
    out.dt = cfg.dt * tscale;
    out.t_end = cfg.steps()? as f64 * out.dt;
    out.initial = InitialData::Coefficients(init);
    Ok(out)
}

/// Runs the base and rescaled configurations and compares them at the
/// final matched time; also reports initial `E^s` ratios for `s_values`.
pub fn scaled_solution_check(cfg: &SimConfig, lambda: f64, s_values: &[f64]) -> Result<ScalingReport> {
    let scfg = scaled_config(cfg, lambda)?;
    scfg.validate()?;
    let base = simulate(cfg)?;
    let scaled = simulate(&scfg)?;
    let b_end = base.states.last().ok_or(BozkError::Empty("trajectory"))?;
    let s_end = scaled.states.last().ok_or(BozkError::Empty("trajectory"))?;
    let ub = inverse_transform_complex(b_end)?.mapv(|z| lambda * z.re);
    let us = inverse_transform_complex(s_end)?.mapv(|z| z.re);
    let num: f64 = ub.iter().zip(us.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = ub.iter().map(|a| a * a).sum();
    let discrepancy = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };

    let a = cfg.params.alpha();
    let u0 = cfg.initial_field()?;
    let v0: &SpectralField2D = match &scfg.initial {
        InitialData::Coefficients(c) => c,
        InitialData::Preset(_) => unreachable!("scaled config carries coefficients"),
    };
    let p = cfg.params;
    let expo = 0.75 - 1.0 / (2.0 * a);
    let norms = s_values
        .iter()
        .map(|&s| {
            let measured = es_norm(v0, s, &p) / es_norm(&u0, s, &p);
            let bound = lambda.powf(expo) * (1.0 + lambda.powf(s));
            NormScaling {
                s,
                measured,
                bound,
                ratio_to_bound: measured / bound,
            }
        })
        .collect();
    let l2 = v0.l2_norm() / u0.l2_norm();
    Ok(ScalingReport {
        lambda,
        discrepancy,
        base_time: *base.times.last().unwrap_or(&0.0),
        scaled_time: *scaled.times.last().unwrap_or(&0.0),
        norms,
        l2_exponent_measured: if lambda == 1.0 { expo } else { l2.ln() / lambda.ln() },
        l2_exponent_predicted: expo,
    })
}
