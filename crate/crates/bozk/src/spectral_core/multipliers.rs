use num_complex::Complex64;

use super::field::SpectralField2D;
use super::params::DispersionParams;
use super::symbols::{abs_pow, eval_omega};
use crate::lp_toolkit::chi;

/// Fourier multipliers acting in the x variable only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XMultiplier {
    /// `|xi|^order`, i.e. `D_x^order`.
    FracDerivative(f64),
    /// `i xi`, i.e. `d/dx`.
    DDx,
}

/// Pointwise multiplication by `m(xi, mu)`. `hermitian_out` states whether
/// the result represents a real field; it is only kept when the input does.
pub fn apply_multiplier(
    field: &SpectralField2D,
    hermitian_out: bool,
    m: impl Fn(f64, f64) -> Complex64,
) -> SpectralField2D {
    let g = field.grid;
    let mut coeffs = field.coeffs.clone();
    for ((j, k), c) in coeffs.indexed_iter_mut() {
        *c *= m(g.xi_at(j), g.mu_at(k));
    }
    SpectralField2D {
        coeffs,
        grid: g,
        hermitian: field.hermitian && hermitian_out,
    }
}

/// Multiplication by a real even multiplier; the hermitian flag is kept.
pub fn apply_real_multiplier(
    field: &SpectralField2D,
    m: impl Fn(f64, f64) -> f64,
) -> SpectralField2D {
    apply_multiplier(field, true, |xi, mu| Complex64::new(m(xi, mu), 0.0))
}

pub fn apply_x_multiplier(field: &SpectralField2D, kind: XMultiplier) -> SpectralField2D {
    match kind {
        XMultiplier::FracDerivative(order) => {
            apply_real_multiplier(field, |xi, _| abs_pow(xi, order))
        }
        XMultiplier::DDx => apply_multiplier(field, true, |xi, _| Complex64::new(0.0, xi)),
    }
}

/// Multiplication by `i mu`, i.e. `d/dy`.
pub fn apply_y_derivative(field: &SpectralField2D) -> SpectralField2D {
    apply_multiplier(field, true, |_, mu| Complex64::new(0.0, mu))
}

/// Exact linear propagator `U(t)`: multiplication by `e^{i t omega}`.
pub fn propagate(field: &SpectralField2D, t: f64, p: &DispersionParams) -> SpectralField2D {
    if t == 0.0 {
        return field.clone();
    }
    apply_multiplier(field, true, |xi, mu| {
        Complex64::from_polar(1.0, t * eval_omega(xi, mu, p))
    })
}

/// Mollifier symbol `chi(lambda^{1/alpha} xi) chi(lambda^{1/2} mu)`.
pub fn mollifier_multiplier(xi: f64, mu: f64, lambda: f64, p: &DispersionParams) -> f64 {
    chi(lambda.powf(1.0 / p.alpha()) * xi) * chi(lambda.sqrt() * mu)
}

/// Fourier-side mollification at scale `lambda > 0`.
pub fn mollify(field: &SpectralField2D, lambda: f64, p: &DispersionParams) -> SpectralField2D {
    assert!(lambda > 0.0, "mollify requires lambda > 0");
    apply_real_multiplier(field, |xi, mu| mollifier_multiplier(xi, mu, lambda, p))
}
