//! Binary coefficient files.
//!
//! Layout (all little-endian): `nx: u64`, `ny: u64`, `lx: f64`, `ly: f64`,
//! `alpha: f64`, then `nx * ny` pairs `(re: f64, im: f64)` in row-major
//! storage order (x index outer, FFT ordering of wavenumbers). A trajectory
//! file is a concatenation of such frames.

use std::io::{ErrorKind, Read, Write};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{BozkError, Result};
use crate::spectral_core::{Grid2D, SpectralField2D};

pub fn write_coefficients(w: &mut impl Write, field: &SpectralField2D, alpha: f64) -> Result<()> {
    let g = field.grid;
    let mut buf = Vec::with_capacity(40 + 16 * g.nx() * g.ny());
    buf.extend_from_slice(&(g.nx() as u64).to_le_bytes());
    buf.extend_from_slice(&(g.ny() as u64).to_le_bytes());
    for v in [g.lx(), g.ly(), alpha] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for c in field.coeffs.iter() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_u64(r: &mut impl Read) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> std::io::Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

/// Reads one frame. The hermitian flag is set when the coefficients pass
/// the conjugate-symmetry check.
pub fn read_coefficients(r: &mut impl Read) -> Result<(SpectralField2D, f64)> {
    read_frame(r)?.ok_or_else(|| BozkError::Format("empty file".into()))
}

fn read_frame(r: &mut impl Read) -> Result<Option<(SpectralField2D, f64)>> {
    let nx = match read_u64(r) {
        Ok(v) => v,
        Err(e) if e.kind() == ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let fmt = |e: std::io::Error| BozkError::Format(format!("truncated frame: {e}"));
    let ny = read_u64(r).map_err(fmt)?;
    let lx = read_f64(r).map_err(fmt)?;
    let ly = read_f64(r).map_err(fmt)?;
    let alpha = read_f64(r).map_err(fmt)?;
    if nx > 1 << 16 || ny > 1 << 16 {
        return Err(BozkError::Format(format!("implausible size {nx} x {ny}")));
    }
    let grid = Grid2D::new(nx as usize, ny as usize, lx, ly)?;
    let mut payload = vec![0u8; 16 * grid.nx() * grid.ny()];
    r.read_exact(&mut payload).map_err(fmt)?;
    let vals: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    let coeffs = Array2::from_shape_vec(grid.shape(), vals)
        .map_err(|e| BozkError::Format(e.to_string()))?;
    let mut f = SpectralField2D::new(grid, coeffs, false)?;
    f.hermitian = f.hermitian_defect() <= 1e-12;
    Ok(Some((f, alpha)))
}

pub fn write_trajectory_frames(w: &mut impl Write, frames: &[SpectralField2D], alpha: f64) -> Result<()> {
    for f in frames {
        write_coefficients(w, f, alpha)?;
    }
    Ok(())
}

pub fn read_trajectory_frames(r: &mut impl Read) -> Result<Vec<(SpectralField2D, f64)>> {
    let mut out = Vec::new();
    while let Some(f) = read_frame(r)? {
        out.push(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_single_and_multi_frame() {
        let g = Grid2D::new(8, 16, 3.0, 4.5).unwrap();
        let mut f = SpectralField2D::zeros(g, true);
        f.coeffs[[1, 2]] = Complex64::new(0.25, -1.5);
        f.coeffs[[7, 14]] = Complex64::new(0.25, 1.5);
        let mut buf = Vec::new();
        write_coefficients(&mut buf, &f, 1.5).unwrap();
        assert_eq!(buf.len(), 40 + 16 * 128);
        let (back, a) = read_coefficients(&mut buf.as_slice()).unwrap();
        assert_eq!(a, 1.5);
        assert_eq!(back, f);
        let mut buf = Vec::new();
        write_trajectory_frames(&mut buf, &[f.clone(), f.scale(2.0)], 2.0).unwrap();
        let frames = read_trajectory_frames(&mut buf.as_slice()).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[1].0, f.scale(2.0));
    }

    #[test]
    fn truncated_file_is_error() {
        let g = Grid2D::new(8, 8, 1.0, 1.0).unwrap();
        let mut buf = Vec::new();
        write_coefficients(&mut buf, &SpectralField2D::zeros(g, true), 1.0).unwrap();
        buf.truncate(100);
        assert!(matches!(read_coefficients(&mut buf.as_slice()), Err(BozkError::Format(_))));
    }
}
