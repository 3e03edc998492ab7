use ndarray::Array2;
use num_complex::Complex64;

use super::grid::Grid2D;
use crate::error::{BozkError, Result};

/// Physical samples `values[[j, k]] = f(x_j, y_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField2D {
    pub values: Array2<f64>,
    pub grid: Grid2D,
}

impl RealField2D {
    pub fn new(grid: Grid2D, values: Array2<f64>) -> Result<Self> {
        check_shape(&grid, values.dim())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(BozkError::NonFinite("RealField2D"));
        }
        Ok(Self { values, grid })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            values: Array2::zeros(grid.shape()),
            grid,
        }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn(grid.shape(), |(j, k)| f(grid.x_at(j), grid.y_at(k)));
        Self { values, grid }
    }

    /// `(sum |f|^p dx dy)^{1/p}`, or the max for `p = inf`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_of(self.values.iter().map(|v| v.abs()), self.grid.cell_area(), p)
    }

    /// `sum f dx dy`.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.grid.cell_area()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn lp_norm_of(abs: impl Iterator<Item = f64>, weight: f64, p: f64) -> f64 {
    if p.is_infinite() {
        abs.fold(0.0, f64::max)
    } else {
        (abs.map(|a| a.powf(p)).sum::<f64>() * weight).powf(1.0 / p)
    }
}

/// Fourier coefficients `coeffs[[j, k]] = f_hat(xi_j, mu_k)` in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField2D {
    pub coeffs: Array2<Complex64>,
    pub grid: Grid2D,
    /// Set when the coefficients represent a real field.
    pub hermitian: bool,
}

/// Relative tolerance used when validating the hermitian flag.
pub(crate) const HERMITIAN_TOL: f64 = 1e-12;

impl SpectralField2D {
    /// Checked constructor: validates shape, finiteness and, when `hermitian`
    /// is set, conjugate symmetry off the Nyquist row and column.
    pub fn new(grid: Grid2D, coeffs: Array2<Complex64>, hermitian: bool) -> Result<Self> {
        check_shape(&grid, coeffs.dim())?;
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(BozkError::NonFinite("SpectralField2D"));
        }
        let f = Self {
            coeffs,
            grid,
            hermitian,
        };
        if hermitian {
            let d = f.hermitian_defect();
            if d > HERMITIAN_TOL {
                return Err(BozkError::NotHermitian(d));
            }
        }
        Ok(f)
    }

    pub fn zeros(grid: Grid2D, hermitian: bool) -> Self {
        Self {
            coeffs: Array2::zeros(grid.shape()),
            grid,
            hermitian,
        }
    }

    /// Builds coefficients from a function of `(xi, mu)`. The caller asserts
    /// the hermitian property; nothing is symmetrized.
    pub fn from_fn(grid: Grid2D, hermitian: bool, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let coeffs =
            Array2::from_shape_fn(grid.shape(), |(j, k)| f(grid.xi_at(j), grid.mu_at(k)));
        Self {
            coeffs,
            grid,
            hermitian,
        }
    }

    /// Discrete `L^2` norm `(sum |f_hat|^2 dxi dmu)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.freq_cell_area()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// `max |c(-z) - conj c(z)| / max |c|` over entries with a lattice partner.
    pub fn hermitian_defect(&self) -> f64 {
        let (nx, ny) = self.grid.shape();
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for j in 0..nx {
            for k in 0..ny {
                if self.grid.is_nyquist(j, k) {
                    continue;
                }
                let (jm, km) = ((nx - j) % nx, (ny - k) % ny);
                let d = (self.coeffs[[jm, km]] - self.coeffs[[j, k]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// Entrywise `self + a * other`.
    pub fn axpy(&self, a: f64, other: &SpectralField2D) -> Result<SpectralField2D> {
        if self.grid != other.grid {
            return Err(BozkError::GridMismatch);
        }
        Ok(SpectralField2D {
            coeffs: &self.coeffs + &other.coeffs.mapv(|c| c * a),
            grid: self.grid,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn scale(&self, a: f64) -> SpectralField2D {
        SpectralField2D {
            coeffs: self.coeffs.mapv(|c| c * a),
            grid: self.grid,
            hermitian: self.hermitian,
        }
    }

    /// Real pairing `int f g dx dy = sum f_hat(z) g_hat(-z) dxi dmu` for
    /// real fields, evaluated as `Re sum f_hat conj(g_hat) dxi dmu`.
    pub fn inner_real(&self, other: &SpectralField2D) -> Result<f64> {
        if self.grid != other.grid {
            return Err(BozkError::GridMismatch);
        }
        let s: f64 = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        Ok(s * self.grid.freq_cell_area())
    }
}

fn check_shape(grid: &Grid2D, got: (usize, usize)) -> Result<()> {
    if got != grid.shape() {
        return Err(BozkError::ShapeMismatch {
            expected: grid.shape(),
            got,
        });
    }
    Ok(())
}
