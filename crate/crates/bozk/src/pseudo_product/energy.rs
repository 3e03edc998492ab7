use super::apply::pi_eta_apply_masked;
use super::symbols::BilinearSymbol;
use crate::error::{BozkError, Result};
use crate::lp_toolkit::{bs_norm_trajectory, project, psi_h, resolved_shells, DyadicIndex, Projection};
use crate::spectral_core::{
    inverse_transform_complex, transform, DispersionParams, RealField2D, SpectralField2D,
};

/// Coefficient of the nonlinearity written as `c1 d_x(u v)`; the equation's
/// `u u_x` is `(1/2) d_x(u^2)`.
pub const C1: f64 = 0.5;

/// Normalization of the energy symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyVariant {
    /// `u = v`: `eta = -eta_3 / (2 c1)`.
    #[default]
    SameField,
    /// `u != v`: `eta = -eta_3 / c1`.
    Difference,
}

pub fn modified_energy_symbol(
    h: DyadicIndex,
    p: DispersionParams,
    variant: EnergyVariant,
) -> BilinearSymbol {
    let factor = match variant {
        EnergyVariant::SameField => -1.0 / (2.0 * C1),
        EnergyVariant::Difference => -1.0 / C1,
    };
    BilinearSymbol::eta3(h, p).scaled(factor)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedEnergy {
    pub h: DyadicIndex,
    /// `||P_H v||^2`.
    pub shell: f64,
    /// `H^{-1} int Pi_eta(P_{<<H} u, v) P_H v`.
    pub correction: f64,
    /// `shell + correction`.
    pub value: f64,
}

/// `E_H(v) = ||P_H v||^2 + H^{-1} int Pi_eta(P_{<<H} u, v) P_H v`.
pub fn modified_energy(
    u: &RealField2D,
    v: &RealField2D,
    h: DyadicIndex,
    eta: &BilinearSymbol,
    p: &DispersionParams,
) -> Result<ModifiedEnergy> {
    if u.grid != v.grid {
        return Err(BozkError::GridMismatch);
    }
    modified_energy_spectral(&transform(u)?, &transform(v)?, h, eta, p)
}

/// [`modified_energy`] on transformed fields.
pub fn modified_energy_spectral(
    uh: &SpectralField2D,
    vh: &SpectralField2D,
    h: DyadicIndex,
    eta: &BilinearSymbol,
    p: &DispersionParams,
) -> Result<ModifiedEnergy> {
    if uh.grid != vh.grid {
        return Err(BozkError::GridMismatch);
    }
    let g = vh.grid;
    let ph_v = project(vh, Projection::PH(h), p)?;
    let shell = ph_v.l2_norm().powi(2);
    let correction = if h.value() < 8 || eta.bound == 0.0 {
        0.0
    } else {
        let ull = project(uh, Projection::PLl(h), p)?;
        let pi = pi_eta_apply_masked(&ull, vh, eta, |j, k| {
            psi_h(h, g.xi_at(j), g.mu_at(k), p) != 0.0
        })?;
        let a = inverse_transform_complex(&pi)?;
        let b = inverse_transform_complex(&ph_v)?;
        let s: f64 = a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re).sum();
        s * g.cell_area() / h.as_f64()
    };
    Ok(ModifiedEnergy {
        h,
        shell,
        correction,
        value: shell + correction,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShellCoercivity {
    pub h: DyadicIndex,
    /// Whether `||P_H v||^2` is above the resolution floor at some time.
    pub resolved: bool,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub max_abs_correction: f64,
    pub max_shell_energy: f64,
    pub sup_abs_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityReport {
    pub s: f64,
    pub bs_norm_v: f64,
    pub b0_norm_u: f64,
    /// Dyadic-sup energy `E^s_T(v)`.
    pub es_t: f64,
    /// `||v||_{B^s}^2 / (E^s_T + ||u||_{B^0} ||v||_{B^s}^2)`.
    pub inferred_constant: f64,
    pub shells: Vec<ShellCoercivity>,
}

/// Shell energies below `SHELL_FLOOR * ||v(t)||^2` are treated as unresolved.
pub const SHELL_FLOOR: f64 = 1e-20;

pub fn coercivity_report(
    u_traj: &[SpectralField2D],
    v_traj: &[SpectralField2D],
    s: f64,
    p: &DispersionParams,
    variant: EnergyVariant,
) -> Result<CoercivityReport> {
    if u_traj.len() != v_traj.len() {
        return Err(BozkError::InvalidParameter(
            "trajectories must have equal length".into(),
        ));
    }
    let v0 = v_traj.first().ok_or(BozkError::Empty("trajectory"))?;
    let grid = v0.grid;
    if u_traj.iter().chain(v_traj).any(|f| f.grid != grid) {
        return Err(BozkError::GridMismatch);
    }
    let bs_norm_v = bs_norm_trajectory(v_traj, s, p)?;
    let b0_norm_u = bs_norm_trajectory(u_traj, 0.0, p)?;
    let shells_h = resolved_shells(&grid, p);
    let p1 = project(v0, Projection::PH(shells_h[0]), p)?.l2_norm().powi(2);
    let mut es_t = p1;
    let mut shells = Vec::new();
    for &h in shells_h.iter().skip(1) {
        let eta = modified_energy_symbol(h, *p, variant);
        let mut rec = ShellCoercivity {
            h,
            resolved: false,
            min_ratio: f64::INFINITY,
            max_ratio: f64::NEG_INFINITY,
            max_abs_correction: 0.0,
            max_shell_energy: 0.0,
            sup_abs_energy: 0.0,
        };
        for (u, v) in u_traj.iter().zip(v_traj) {
            let e = modified_energy_spectral(u, v, h, &eta, p)?;
            rec.sup_abs_energy = rec.sup_abs_energy.max(e.value.abs());
            rec.max_abs_correction = rec.max_abs_correction.max(e.correction.abs());
            rec.max_shell_energy = rec.max_shell_energy.max(e.shell);
            if e.shell > SHELL_FLOOR * v.l2_norm().powi(2) {
                rec.resolved = true;
                let r = e.value / e.shell;
                rec.min_ratio = rec.min_ratio.min(r);
                rec.max_ratio = rec.max_ratio.max(r);
            }
        }
        es_t += h.as_f64().powf(2.0 * s) * rec.sup_abs_energy;
        shells.push(rec);
    }
    let denom = es_t + b0_norm_u * bs_norm_v * bs_norm_v;
    Ok(CoercivityReport {
        s,
        bs_norm_v,
        b0_norm_u,
        es_t,
        inferred_constant: if denom > 0.0 { bs_norm_v * bs_norm_v / denom } else { f64::NAN },
        shells,
    })
}
