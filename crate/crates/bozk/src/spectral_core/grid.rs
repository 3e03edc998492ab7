use std::f64::consts::PI;

use crate::error::{BozkError, Result};

/// Periodic box `[0, lx) x [0, ly)` sampled on `nx x ny` points.
///
/// Arrays are stored in FFT order: storage index `j` along x carries the
/// signed wavenumber `j` for `j < nx/2` and `j - nx` otherwise, so the
/// lattice is `{-nx/2, ..., nx/2 - 1}` with the Nyquist row at `j = nx/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(BozkError::InvalidParameter(format!(
                    "{name} = {n} must be a power of two >= 8"
                )));
            }
        }
        for (name, l) in [("lx", lx), ("ly", ly)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(BozkError::InvalidParameter(format!(
                    "{name} = {l} must be finite and > 0"
                )));
            }
        }
        Ok(Self { nx, ny, lx, ly })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.lx
    }
    pub fn dmu(&self) -> f64 {
        2.0 * PI / self.ly
    }
    /// Physical quadrature weight `dx dy`.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }
    /// Frequency quadrature weight `dxi dmu`.
    pub fn freq_cell_area(&self) -> f64 {
        self.dxi() * self.dmu()
    }

    /// Signed x-wavenumber of storage index `j`.
    pub fn kx(&self, j: usize) -> i64 {
        signed(j, self.nx)
    }
    /// Signed y-wavenumber of storage index `k`.
    pub fn ky(&self, k: usize) -> i64 {
        signed(k, self.ny)
    }
    /// Storage index of signed x-wavenumber `m`, if it lies on the lattice.
    pub fn index_x(&self, m: i64) -> Option<usize> {
        unsigned(m, self.nx)
    }
    /// Storage index of signed y-wavenumber `m`, if it lies on the lattice.
    pub fn index_y(&self, m: i64) -> Option<usize> {
        unsigned(m, self.ny)
    }

    pub fn xi_at(&self, j: usize) -> f64 {
        self.kx(j) as f64 * self.dxi()
    }
    pub fn mu_at(&self, k: usize) -> f64 {
        self.ky(k) as f64 * self.dmu()
    }
    pub fn x_at(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }
    pub fn y_at(&self, k: usize) -> f64 {
        k as f64 * self.dy()
    }

    /// Increasing x-frequency lattice `2 pi j / lx`, `j = -nx/2 .. nx/2 - 1`.
    pub fn xi(&self) -> Vec<f64> {
        let h = self.nx as i64 / 2;
        (-h..h).map(|m| m as f64 * self.dxi()).collect()
    }
    /// Increasing y-frequency lattice.
    pub fn mu(&self) -> Vec<f64> {
        let h = self.ny as i64 / 2;
        (-h..h).map(|m| m as f64 * self.dmu()).collect()
    }

    /// True on the unpaired Nyquist row or column.
    pub fn is_nyquist(&self, j: usize, k: usize) -> bool {
        j == self.nx / 2 || k == self.ny / 2
    }
}

fn signed(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn unsigned(m: i64, n: usize) -> Option<usize> {
    let h = n as i64 / 2;
    if m < -h || m >= h {
        None
    } else if m >= 0 {
        Some(m as usize)
    } else {
        Some((m + n as i64) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattices_are_increasing_and_symmetric() {
        let g = Grid2D::new(16, 8, 2.0 * PI, 4.0 * PI).unwrap();
        let xi = g.xi();
        assert_eq!(xi.len(), 16);
        assert!(xi.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(xi[0], -8.0);
        assert_eq!(xi[15], 7.0);
        let mu = g.mu();
        assert_eq!(mu[0], -2.0);
        assert_eq!(mu[7], 1.5);
    }

    #[test]
    fn index_roundtrip() {
        let g = Grid2D::new(32, 16, 1.0, 1.0).unwrap();
        for j in 0..32 {
            assert_eq!(g.index_x(g.kx(j)), Some(j));
        }
        assert_eq!(g.kx(16), -16);
        assert_eq!(g.index_x(16), None);
        assert_eq!(g.index_y(-9), None);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid2D::new(12, 16, 1.0, 1.0).is_err());
        assert!(Grid2D::new(4, 16, 1.0, 1.0).is_err());
        assert!(Grid2D::new(16, 16, 0.0, 1.0).is_err());
    }
}
