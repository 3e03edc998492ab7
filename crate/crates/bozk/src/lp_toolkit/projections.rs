//! Frequency projections. With `X = |xi|^alpha + mu^2` and the telescoping
//! identity `sum_{K <= M} psi_K = chi(X / M)`, the shell groupings are
//!
//! * `P_le(H)`  = shells `K <= H`:          `chi(X / H)`
//! * `P_ll(H)`  = shells `K <= H/8`:        `chi(8 X / H)` (zero when `H < 8`)
//! * `P_sim(H)` = shells `H/4 <= K <= 4H`:  `chi(X / 4H) - P_ll(H)`
//! * `P_gg(H)`  = shells `K >= 8H`:         `1 - chi(X / 4H)`
//!
//! so that `P_ll + P_sim + P_gg` is the identity.

use crate::error::{BozkError, Result};
use crate::spectral_core::{abs_pow, apply_real_multiplier, DispersionParams, SpectralField2D};

use super::cutoffs::{chi, psi_h, rho_delta, varphi_n};
use super::dyadic::DyadicIndex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    /// `varphi_N(xi)`.
    PNx(DyadicIndex),
    /// `psi_H(xi, mu)`.
    PH(DyadicIndex),
    PLe(DyadicIndex),
    PLl(DyadicIndex),
    PSim(DyadicIndex),
    PGg(DyadicIndex),
    /// `rho_delta(B - mu^2 / |xi|^alpha)`, a smooth indicator of the
    /// complement of the critical band.
    PNonresonant(f64),
}

impl Projection {
    pub fn validate(&self) -> Result<()> {
        if let Projection::PNonresonant(d) = *self {
            if !(d > 0.0 && d < 1.0) {
                return Err(BozkError::InvalidParameter(format!(
                    "delta = {d} violates 0 < delta < 1"
                )));
            }
        }
        Ok(())
    }

    /// Multiplier value at `(xi, mu)`.
    pub fn multiplier(&self, xi: f64, mu: f64, p: &DispersionParams) -> f64 {
        let x = || abs_pow(xi, p.alpha()) + mu * mu;
        match *self {
            Projection::PNx(n) => varphi_n(n, xi),
            Projection::PH(h) => psi_h(h, xi, mu, p),
            Projection::PLe(h) => chi(x() / h.as_f64()),
            Projection::PLl(h) => ll(x(), h),
            Projection::PSim(h) => chi(x() / (4.0 * h.as_f64())) - ll(x(), h),
            Projection::PGg(h) => 1.0 - chi(x() / (4.0 * h.as_f64())),
            Projection::PNonresonant(delta) => nonresonant(xi, mu, delta, p),
        }
    }
}

fn ll(x: f64, h: DyadicIndex) -> f64 {
    if h.value() < 8 {
        0.0
    } else {
        chi(8.0 * x / h.as_f64())
    }
}

fn nonresonant(xi: f64, mu: f64, delta: f64, p: &DispersionParams) -> f64 {
    if xi == 0.0 {
        return if mu == 0.0 { 0.0 } else { 1.0 };
    }
    rho_delta(p.b() - mu * mu / abs_pow(xi, p.alpha()), delta)
}

pub fn project(
    field: &SpectralField2D,
    selector: Projection,
    p: &DispersionParams,
) -> Result<SpectralField2D> {
    selector.validate()?;
    Ok(apply_real_multiplier(field, |xi, mu| selector.multiplier(xi, mu, p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::{propagate, Grid2D};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d(v: u64) -> DyadicIndex {
        DyadicIndex::new(v).unwrap()
    }

    fn random_field(g: Grid2D, seed: u64) -> SpectralField2D {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SpectralField2D::from_fn(g, false, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn disjoint_shells_annihilate() {
        let p = DispersionParams::new(1.5).unwrap();
        let g = Grid2D::new(64, 64, 8.0, 8.0).unwrap();
        let f = random_field(g, 3);
        for (h, h2) in [(4, 16), (8, 32), (2, 64), (16, 4)] {
            let a = project(&f, Projection::PH(d(h)), &p).unwrap();
            let b = project(&a, Projection::PH(d(h2)), &p).unwrap();
            assert_eq!(b.max_abs(), 0.0);
        }
    }

    #[test]
    fn mode_on_shell_passes_with_weight_one() {
        let p = DispersionParams::new(2.0).unwrap();
        // |1|^2 + 1^2 = 2 = H.
        assert_eq!(Projection::PH(d(2)).multiplier(1.0, 1.0, &p), 1.0);
        assert_eq!(Projection::PH(d(4)).multiplier(1.0, 1.0, &p), 0.0);
    }

    #[test]
    fn nonresonant_vanishes_on_critical_curve() {
        let p = DispersionParams::new(1.5).unwrap();
        let xi: f64 = 2.3;
        let mu = (p.b() * xi.powf(1.5)).sqrt();
        assert_eq!(Projection::PNonresonant(0.1).multiplier(xi, mu, &p), 0.0);
        assert_eq!(Projection::PNonresonant(0.1).multiplier(0.0, 1.0, &p), 1.0);
        assert_eq!(Projection::PNonresonant(0.1).multiplier(0.0, 0.0, &p), 0.0);
        assert_eq!(Projection::PNonresonant(0.1).multiplier(1.0, 0.0, &p), 1.0);
        assert!(project(&random_field(Grid2D::new(8, 8, 1.0, 1.0).unwrap(), 1), Projection::PNonresonant(1.5), &p).is_err());
    }

    #[test]
    fn groupings_partition_identity() {
        let p = DispersionParams::new(1.0).unwrap();
        for h in [1, 2, 4, 8, 64] {
            for &(xi, mu) in &[(0.0, 0.0), (3.0, 1.0), (40.0, -7.0), (500.0, 2.0)] {
                let s = Projection::PLl(d(h)).multiplier(xi, mu, &p)
                    + Projection::PSim(d(h)).multiplier(xi, mu, &p)
                    + Projection::PGg(d(h)).multiplier(xi, mu, &p);
                assert!((s - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn projection_commutes_with_propagation() {
        let p = DispersionParams::new(1.5).unwrap();
        let g = Grid2D::new(32, 32, 10.0, 10.0).unwrap();
        let f = random_field(g, 9);
        let sel = Projection::PH(d(8));
        let a = propagate(&project(&f, sel, &p).unwrap(), 0.7, &p);
        let b = project(&propagate(&f, 0.7, &p), sel, &p).unwrap();
        let diff = (&a.coeffs - &b.coeffs).mapv(|z| z.norm()).fold(0.0, |m: f64, &v| m.max(v));
        assert!(diff < 1e-12);
    }

    proptest! {
        #[test]
        fn shells_at_distance_two_are_disjoint(
            k in 0u32..12, gap in 2u32..6, xi in -300.0f64..300.0, mu in -30.0f64..30.0,
        ) {
            let p = DispersionParams::new(1.5).unwrap();
            let a = Projection::PH(DyadicIndex::from_exp(k)).multiplier(xi, mu, &p);
            let b = Projection::PH(DyadicIndex::from_exp(k + gap)).multiplier(xi, mu, &p);
            prop_assert_eq!(a * b, 0.0);
        }
    }
}
