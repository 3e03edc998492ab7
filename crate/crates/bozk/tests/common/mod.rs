use bozk::rng::substream;
use bozk::spectral_core::{transform, Grid2D, RealField2D, SpectralField2D};
use bozk::Complex64;
use ndarray::Array2;
use rand::Rng;

/// Random real field with every mode outside `|kx|, |ky| <= cut` removed.
pub fn band_limited(g: Grid2D, cut: i64, seed: u64) -> SpectralField2D {
    let mut rng = substream(seed, 0);
    let u = RealField2D::new(g, Array2::from_shape_fn(g.shape(), |_| rng.random::<f64>() - 0.5)).unwrap();
    let mut f = transform(&u).unwrap();
    for j in 0..g.nx() {
        for k in 0..g.ny() {
            if g.kx(j).abs() > cut || g.ky(k).abs() > cut {
                f.coeffs[[j, k]] = Complex64::new(0.0, 0.0);
            }
        }
    }
    f
}

#[allow(dead_code)]
pub fn max_diff(a: &SpectralField2D, b: &SpectralField2D) -> f64 {
    a.axpy(-1.0, b).unwrap().max_abs()
}
