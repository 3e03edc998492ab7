//! Grids, discrete Fourier transforms, dispersion symbols, Fourier
//! multipliers, the exact linear propagator and the mollifier.
//!
//! Transform convention: with `dx, dy` the physical spacings and
//! `dxi = 2 pi / lx`, `dmu = 2 pi / ly` the frequency spacings,
//!
//! ```text
//! f_hat(xi, mu) = dx dy / (2 pi) * sum_{x,y} f(x, y) e^{-i (x xi + y mu)}
//! f(x, y)       = dxi dmu / (2 pi) * sum_{xi,mu} f_hat(xi, mu) e^{i (x xi + y mu)}
//! ```
//!
//! so both sums are Riemann sums of the unitary continuum transform and
//! `sum |f|^2 dx dy = sum |f_hat|^2 dxi dmu` holds exactly.

mod fft;
mod field;
mod grid;
mod multipliers;
mod params;
mod symbols;

pub(crate) use fft::fft2 as fft2_raw;
pub(crate) use field::lp_norm_of as field_lp_norm;
pub use fft::{inverse_transform, inverse_transform_complex, transform, transform_complex};
pub use field::{RealField2D, SpectralField2D};
pub use grid::Grid2D;
pub use multipliers::{
    apply_multiplier, apply_real_multiplier, apply_x_multiplier, apply_y_derivative, mollify,
    mollifier_multiplier, propagate, XMultiplier,
};
pub use params::DispersionParams;
pub use symbols::{abs_pow, eval_h, eval_omega, eval_resonance, Zeta};
