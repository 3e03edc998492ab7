//! The bilinear pseudo-product `Pi_eta`, its adjoint symbols, the
//! theta-integral symbols of the modified energy, and coercivity
//! diagnostics.
//!
//! Normalization: with the unitary lattice transform,
//!
//! ```text
//! F(Pi_eta(f, g))(z) = dxi dmu / (2 pi) * sum_{z1 + z2 = z} eta(z1, z2) f_hat(z1) g_hat(z2)
//! ```
//!
//! summed linearly (pairs whose sum leaves the lattice are dropped), so that
//! `eta = 1` reproduces the transform of the pointwise product.

mod apply;
mod energy;
mod symbols;

pub use apply::{pi_eta_apply, pi_eta_apply_masked};
pub use energy::{
    coercivity_report, modified_energy, modified_energy_symbol, CoercivityReport, EnergyVariant,
    ModifiedEnergy, ShellCoercivity,
};
pub use symbols::{
    adjoint_symbols, energy_eta1_eval, energy_eta2_eval, eta3_eval, eta_tilde_eval,
    varphi_deriv_sup, BilinearSymbol, SymbolTag, THETA_ORDER, THETA_PANELS,
};
