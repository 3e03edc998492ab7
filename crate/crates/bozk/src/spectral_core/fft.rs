use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{RealField2D, SpectralField2D};
use super::grid::Grid2D;
use crate::error::{BozkError, Result};

struct Plan2 {
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

fn plan(nx: usize, ny: usize) -> Arc<Plan2> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Plan2>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry((nx, ny))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plan2 {
                fwd_x: planner.plan_fft_forward(nx),
                inv_x: planner.plan_fft_inverse(nx),
                fwd_y: planner.plan_fft_forward(ny),
                inv_y: planner.plan_fft_inverse(ny),
            })
        })
        .clone()
}

/// Unnormalized 2-D DFT in place (`inverse` selects the `+i` sign).
pub(crate) fn fft2(data: &mut Array2<Complex64>, inverse: bool) {
    let (nx, ny) = data.dim();
    let p = plan(nx, ny);
    let (fx, fy) = if inverse {
        (&p.inv_x, &p.inv_y)
    } else {
        (&p.fwd_x, &p.fwd_y)
    };
    if !data.is_standard_layout() {
        *data = data.as_standard_layout().into_owned();
    }
    fy.process(data.as_slice_mut().expect("standard layout"));
    // x transforms on blocks of columns gathered into contiguous scratch,
    // so no full-size transposed copy is made.
    const BLOCK: usize = 32;
    let mut scratch = vec![Complex64::new(0.0, 0.0); nx * BLOCK.min(ny)];
    for k0 in (0..ny).step_by(BLOCK) {
        let w = BLOCK.min(ny - k0);
        let block = &mut scratch[..nx * w];
        for j in 0..nx {
            for c in 0..w {
                block[c * nx + j] = data[[j, k0 + c]];
            }
        }
        fx.process(block);
        for j in 0..nx {
            for c in 0..w {
                data[[j, k0 + c]] = block[c * nx + j];
            }
        }
    }
}

fn check(grid: &Grid2D, dim: (usize, usize)) -> Result<()> {
    if dim != grid.shape() {
        return Err(BozkError::ShapeMismatch {
            expected: grid.shape(),
            got: dim,
        });
    }
    Ok(())
}

/// Forward transform of a real field; the result is flagged hermitian.
pub fn transform(f: &RealField2D) -> Result<SpectralField2D> {
    check(&f.grid, f.values.dim())?;
    let mut c = f.values.mapv(|v| Complex64::new(v, 0.0));
    fft2(&mut c, false);
    let w = f.grid.cell_area() / (2.0 * PI);
    c.mapv_inplace(|z| z * w);
    Ok(SpectralField2D {
        coeffs: c,
        grid: f.grid,
        hermitian: true,
    })
}

/// Forward transform of complex samples; the result is not flagged hermitian.
pub fn transform_complex(grid: &Grid2D, values: &Array2<Complex64>) -> Result<SpectralField2D> {
    check(grid, values.dim())?;
    let mut c = values.clone();
    fft2(&mut c, false);
    let w = grid.cell_area() / (2.0 * PI);
    c.mapv_inplace(|z| z * w);
    Ok(SpectralField2D {
        coeffs: c,
        grid: *grid,
        hermitian: false,
    })
}

/// Complex physical samples of any spectral field.
pub fn inverse_transform_complex(f: &SpectralField2D) -> Result<Array2<Complex64>> {
    check(&f.grid, f.coeffs.dim())?;
    let mut c = f.coeffs.clone();
    fft2(&mut c, true);
    let w = f.grid.freq_cell_area() / (2.0 * PI);
    c.mapv_inplace(|z| z * w);
    Ok(c)
}

/// Inverse transform of a hermitian field. The imaginary part, which is
/// roundoff plus the contribution of the unpaired Nyquist entries, is
/// discarded. Fields not flagged hermitian are rejected.
pub fn inverse_transform(f: &SpectralField2D) -> Result<RealField2D> {
    if !f.hermitian {
        return Err(BozkError::NotHermitian(f64::NAN));
    }
    let c = inverse_transform_complex(f)?;
    Ok(RealField2D {
        values: c.mapv(|z| z.re),
        grid: f.grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn torus(n: usize) -> Grid2D {
        Grid2D::new(n, n, 2.0 * PI, 2.0 * PI).unwrap()
    }

    #[test]
    fn constant_maps_to_origin() {
        let g = torus(16);
        let f = RealField2D::from_fn(g, |_, _| 1.0);
        let c = transform(&f).unwrap();
        // (2 pi)^2 / (2 pi) = 2 pi at the origin, zero elsewhere.
        assert!((c.coeffs[[0, 0]].re - 2.0 * PI).abs() < 1e-12);
        let rest: f64 = c.coeffs.iter().skip(1).map(|z| z.norm()).sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn cosine_has_two_conjugate_modes() {
        let g = torus(16);
        let f = RealField2D::from_fn(g, |x, _| x.cos());
        let c = transform(&f).unwrap();
        let (p, m) = (c.coeffs[[1, 0]], c.coeffs[[15, 0]]);
        assert!((p - m.conj()).norm() < 1e-13);
        assert!((p.re - PI).abs() < 1e-12);
        let total: f64 = c.coeffs.iter().map(|z| z.norm()).sum();
        assert!((total - 2.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn roundtrip_and_parseval_on_random_field() {
        let g = Grid2D::new(32, 64, 3.0, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = Array2::from_shape_fn(g.shape(), |_| rng.random_range(-1.0..1.0));
        let f = RealField2D::new(g, v).unwrap();
        let c = transform(&f).unwrap();
        let back = inverse_transform(&c).unwrap();
        let err = (&back.values - &f.values).mapv(f64::abs).fold(0.0, |a: f64, &b| a.max(b));
        assert!(err < 1e-12 * f.max_abs());
        let lhs = f.lp_norm(2.0);
        assert!((lhs - c.l2_norm()).abs() < 1e-12 * lhs);
        assert!(c.hermitian_defect() < 1e-14);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let g = torus(16);
        let bad = RealField2D {
            values: Array2::zeros((16, 8)),
            grid: g,
        };
        assert!(transform(&bad).is_err());
    }
}
