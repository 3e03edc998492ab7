use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use super::symbols::BilinearSymbol;
use crate::error::{BozkError, Result};
use crate::spectral_core::{Grid2D, SpectralField2D};

/// Direct-summation pseudo-product on the lattice.
///
/// Only nonzero coefficients of `f` and `g` are visited; accumulation runs
/// over `f`-entries in storage order, then `g`-entries, so the floating-point
/// summation order is fixed.
pub fn pi_eta_apply(
    f: &SpectralField2D,
    g: &SpectralField2D,
    eta: &BilinearSymbol,
) -> Result<SpectralField2D> {
    pi_eta_apply_masked(f, g, eta, |_, _| true)
}

/// As [`pi_eta_apply`], computing only output entries `(j, k)` (storage
/// indices) for which `keep(j, k)` holds; the rest are left at zero.
pub fn pi_eta_apply_masked(
    f: &SpectralField2D,
    g: &SpectralField2D,
    eta: &BilinearSymbol,
    keep: impl Fn(usize, usize) -> bool,
) -> Result<SpectralField2D> {
    if f.grid != g.grid {
        return Err(BozkError::GridMismatch);
    }
    let grid = f.grid;
    let nf = nonzeros(f);
    let ng = nonzeros(g);
    let mut out = Array2::<Complex64>::zeros(grid.shape());
    for &(ax, ay, za, ca) in &nf {
        for &(bx, by, zb, cb) in &ng {
            let (Some(j), Some(k)) = (grid.index_x(ax + bx), grid.index_y(ay + by)) else {
                continue;
            };
            if !keep(j, k) {
                continue;
            }
            out[[j, k]] += eta.eval(za, zb) * ca * cb;
        }
    }
    let w = grid.freq_cell_area() / (2.0 * PI);
    out.mapv_inplace(|z| z * w);
    Ok(SpectralField2D {
        coeffs: out,
        grid,
        hermitian: f.hermitian && g.hermitian && eta.conj_symmetric,
    })
}

type Entry = (i64, i64, (f64, f64), Complex64);

fn nonzeros(f: &SpectralField2D) -> Vec<Entry> {
    let g: Grid2D = f.grid;
    f.coeffs
        .indexed_iter()
        .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
        .map(|((j, k), c)| (g.kx(j), g.ky(k), (g.xi_at(j), g.mu_at(k)), *c))
        .collect()
}
