use ndarray::Array2;

use crate::error::{BozkError, Result};
use crate::spectral_core::{
    abs_pow, eval_h, transform, DispersionParams, Grid2D, RealField2D, SpectralField2D,
};

use super::cutoffs::psi_h;
use super::dyadic::DyadicIndex;

/// Japanese bracket `<x> = (1 + x^2)^{1/2}`.
pub fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Frequency weight inside the `E^s` bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EsWeight {
    /// `|xi|^alpha + mu^2`.
    #[default]
    Standard,
    /// `h = (alpha + 1) |xi|^alpha + mu^2`.
    H,
}

/// `|| <|xi|^alpha + mu^2>^s f_hat ||_{L^2}` by lattice quadrature.
pub fn es_norm(field: &SpectralField2D, s: f64, p: &DispersionParams) -> f64 {
    es_norm_weighted(field, s, p, EsWeight::Standard)
}

pub fn es_norm_weighted(field: &SpectralField2D, s: f64, p: &DispersionParams, w: EsWeight) -> f64 {
    let g = field.grid;
    let mut acc = 0.0;
    for ((j, k), c) in field.coeffs.indexed_iter() {
        let (xi, mu) = (g.xi_at(j), g.mu_at(k));
        let x = match w {
            EsWeight::Standard => abs_pow(xi, p.alpha()) + mu * mu,
            EsWeight::H => eval_h(xi, mu, p),
        };
        let weight = if s == 0.0 { 1.0 } else { japanese(x).powf(2.0 * s) };
        acc += weight * c.norm_sqr();
    }
    (acc * g.freq_cell_area()).sqrt()
}

/// Mass and Hamiltonian of a real field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved {
    /// `M = int u^2`.
    pub mass: f64,
    /// `H = int |D_x^{alpha/2} u|^2 + |u_y|^2 + u^3 / 3`, the sign conserved by `u_t - D^alpha u_x + u_xyy = u u_x`.
    pub hamiltonian: f64,
}

pub fn conserved_quantities(u: &RealField2D, p: &DispersionParams) -> Result<Conserved> {
    let uh = transform(u)?;
    Ok(conserved_from_parts(u, &uh, p))
}

pub(crate) fn conserved_from_parts(
    u: &RealField2D,
    uh: &SpectralField2D,
    p: &DispersionParams,
) -> Conserved {
    let g = u.grid;
    let mass = u.values.iter().map(|v| v * v).sum::<f64>() * g.cell_area();
    let mut quad = 0.0;
    for ((j, k), c) in uh.coeffs.indexed_iter() {
        let (xi, mu) = (g.xi_at(j), g.mu_at(k));
        quad += (abs_pow(xi, p.alpha()) + mu * mu) * c.norm_sqr();
    }
    quad *= g.freq_cell_area();
    let cubic = u.values.iter().map(|v| v * v * v).sum::<f64>() * g.cell_area();
    Conserved {
        mass,
        hamiltonian: quad + cubic / 3.0,
    }
}

/// Discrete `L^q_t L^p_{xy}` norm of a uniformly sampled trajectory.
///
/// Each stored time carries weight `dt`; a trajectory with a single sample
/// has no time step and its value is the spatial norm. `q` or `p` equal to
/// `f64::INFINITY` select the max.
pub fn mixed_norm(traj: &[RealField2D], dt: f64, q: f64, p: f64) -> Result<f64> {
    let first = traj.first().ok_or(BozkError::Empty("trajectory"))?;
    if traj.iter().any(|f| f.grid != first.grid) {
        return Err(BozkError::GridMismatch);
    }
    let norms: Vec<f64> = traj.iter().map(|f| f.lp_norm(p)).collect();
    outer_norm(&norms, dt, q)
}

/// Same as [`mixed_norm`] on precomputed moduli `|u(t)|`.
pub fn mixed_norm_abs(frames: &[Array2<f64>], cell_area: f64, dt: f64, q: f64, p: f64) -> Result<f64> {
    if frames.is_empty() {
        return Err(BozkError::Empty("trajectory"));
    }
    let norms: Vec<f64> = frames
        .iter()
        .map(|a| crate::spectral_core::field_lp_norm(a.iter().copied(), cell_area, p))
        .collect();
    outer_norm(&norms, dt, q)
}

fn outer_norm(norms: &[f64], dt: f64, q: f64) -> Result<f64> {
    if norms.len() == 1 {
        return Ok(norms[0]);
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(BozkError::InvalidParameter(format!("time step {dt} must be > 0")));
    }
    Ok(if q.is_infinite() {
        norms.iter().copied().fold(0.0, f64::max)
    } else {
        (norms.iter().map(|n| n.powf(q)).sum::<f64>() * dt).powf(1.0 / q)
    })
}

/// Dyadic shells `H` for which `psi_H` is nonzero somewhere on the grid.
pub fn resolved_shells(grid: &Grid2D, p: &DispersionParams) -> Vec<DyadicIndex> {
    let xmax = abs_pow(grid.nx() as f64 / 2.0 * grid.dxi(), p.alpha())
        + (grid.ny() as f64 / 2.0 * grid.dmu()).powi(2);
    let mut out = vec![DyadicIndex::from_exp(0)];
    let mut k = 1;
    while 2.0 * (1u64 << k) as f64 / 3.0 < xmax {
        out.push(DyadicIndex::from_exp(k));
        k += 1;
    }
    out
}

/// `||P_H f||^2` for each resolved shell.
pub fn shell_energies(field: &SpectralField2D, p: &DispersionParams) -> Vec<(DyadicIndex, f64)> {
    let g = field.grid;
    let shells = resolved_shells(&g, p);
    let mut acc = vec![0.0; shells.len()];
    for ((j, k), c) in field.coeffs.indexed_iter() {
        let (xi, mu) = (g.xi_at(j), g.mu_at(k));
        let n2 = c.norm_sqr();
        if n2 == 0.0 {
            continue;
        }
        for (i, h) in shells.iter().enumerate() {
            let w = psi_h(*h, xi, mu, p);
            if w != 0.0 {
                acc[i] += w * w * n2;
            }
        }
    }
    shells
        .into_iter()
        .zip(acc)
        .map(|(h, a)| (h, a * g.freq_cell_area()))
        .collect()
}

/// Discrete `B^s` norm over the stored samples:
/// `(||P_1 f(t_0)||^2 + sum_{H >= 2} H^{2s} max_t ||P_H f(t)||^2)^{1/2}`.
pub fn bs_norm_trajectory(traj: &[SpectralField2D], s: f64, p: &DispersionParams) -> Result<f64> {
    let first = traj.first().ok_or(BozkError::Empty("trajectory"))?;
    if traj.iter().any(|f| f.grid != first.grid) {
        return Err(BozkError::GridMismatch);
    }
    let per_time: Vec<Vec<(DyadicIndex, f64)>> = traj.iter().map(|f| shell_energies(f, p)).collect();
    let mut total = per_time[0][0].1;
    for i in 1..per_time[0].len() {
        let h = per_time[0][i].0;
        let m = per_time.iter().map(|e| e[i].1).fold(0.0, f64::max);
        total += h.as_f64().powf(2.0 * s) * m;
    }
    Ok(total.sqrt())
}
