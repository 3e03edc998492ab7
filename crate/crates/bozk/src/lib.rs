//! Pseudo-spectral laboratory for the dispersive generalized
//! Benjamin-Ono-Zakharov-Kuznetsov equation
//!
//! ```text
//! u_t - D_x^alpha u_x + u_xyy = u u_x,   1 <= alpha <= 2,
//! ```
//!
//! on a periodic box approximating the plane. The crate provides the
//! spectral plumbing (grids, transforms, dispersion symbols, the linear
//! propagator), Littlewood-Paley tooling, the bilinear pseudo-product, an
//! integrating-factor RK4 solver and a set of numerical experiments that
//! probe dispersive and bilinear estimates for the equation.

pub mod error;
pub mod estimates_lab;
pub mod lp_toolkit;
pub mod pseudo_product;
pub mod quadrature;
pub mod rng;
pub mod solver;
pub mod spectral_core;

pub use error::{BozkError, Result};
pub use num_complex::Complex64;
