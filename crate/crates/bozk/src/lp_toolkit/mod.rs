//! Smooth cutoffs, Littlewood-Paley and non-resonant projections,
//! anisotropic Sobolev / Lebesgue / mixed norms, conserved quantities and
//! dyadic utilities.

mod cutoffs;
mod dyadic;
mod norms;
pub(crate) mod norms_internal {
    pub(crate) use super::norms::conserved_from_parts;
}
mod projections;

pub use cutoffs::{
    chi, chi_deriv, cutoff_eval, psi_h, rho, rho_delta, smoothstep, smoothstep_deriv, varphi,
    varphi_deriv, varphi_n, CutoffPoint, CutoffSpec,
};
pub use dyadic::{dyadic_floor, dyadic_range, DyadicIndex};
pub use norms::{
    bs_norm_trajectory, conserved_quantities, es_norm, es_norm_weighted, japanese, mixed_norm,
    mixed_norm_abs, resolved_shells, shell_energies, Conserved, EsWeight,
};
pub use projections::{project, Projection};
