//! The transition profile is the smoothstep built from the C^inf function
//! `e^{-1/x}`: `S(x) = e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)})` on `(0,1)`.

use crate::error::{BozkError, Result};
use crate::spectral_core::{abs_pow, DispersionParams};

use super::dyadic::DyadicIndex;

pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

pub fn smoothstep_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        let s = a + b;
        a * b * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) / (s * s)
    }
}

const CHI_IN: f64 = 4.0 / 3.0;
const CHI_WIDTH: f64 = 1.0 / 3.0;

/// Even bump: 1 on `[-4/3, 4/3]`, 0 outside `(-5/3, 5/3)`.
pub fn chi(x: f64) -> f64 {
    1.0 - smoothstep((x.abs() - CHI_IN) / CHI_WIDTH)
}

pub fn chi_deriv(x: f64) -> f64 {
    -smoothstep_deriv((x.abs() - CHI_IN) / CHI_WIDTH) / CHI_WIDTH * x.signum()
}

/// `varphi(x) = chi(x) - chi(2x)`, supported in `2/3 < |x| < 5/3`.
pub fn varphi(x: f64) -> f64 {
    chi(x) - chi(2.0 * x)
}

pub fn varphi_deriv(x: f64) -> f64 {
    chi_deriv(x) - 2.0 * chi_deriv(2.0 * x)
}

/// `varphi_N(x) = varphi(x / N)` for `N >= 2` and `chi(x)` for `N = 1`.
pub fn varphi_n(n: DyadicIndex, x: f64) -> f64 {
    if n.value() == 1 {
        chi(x)
    } else {
        varphi(x / n.as_f64())
    }
}

/// `psi_H(xi, mu) = varphi_H(|xi|^alpha + mu^2)`.
pub fn psi_h(h: DyadicIndex, xi: f64, mu: f64, p: &DispersionParams) -> f64 {
    varphi_n(h, abs_pow(xi, p.alpha()) + mu * mu)
}

/// Even ramp: 0 on `[-1/2, 1/2]`, 1 for `|x| >= 1`.
pub fn rho(x: f64) -> f64 {
    smoothstep((x.abs() - 0.5) / 0.5)
}

pub fn rho_delta(x: f64, delta: f64) -> f64 {
    rho(x / delta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffSpec {
    Chi,
    Varphi,
    VarphiN(DyadicIndex),
    PsiH(DyadicIndex),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPoint {
    Scalar(f64),
    Pair(f64, f64),
}

impl From<f64> for CutoffPoint {
    fn from(x: f64) -> Self {
        CutoffPoint::Scalar(x)
    }
}

impl From<(f64, f64)> for CutoffPoint {
    fn from(z: (f64, f64)) -> Self {
        CutoffPoint::Pair(z.0, z.1)
    }
}

/// Evaluates a cutoff. `PsiH` takes a frequency pair, the others a scalar.
pub fn cutoff_eval(
    spec: CutoffSpec,
    point: impl Into<CutoffPoint>,
    p: &DispersionParams,
) -> Result<f64> {
    match (spec, point.into()) {
        (CutoffSpec::Chi, CutoffPoint::Scalar(x)) => Ok(chi(x)),
        (CutoffSpec::Varphi, CutoffPoint::Scalar(x)) => Ok(varphi(x)),
        (CutoffSpec::VarphiN(n), CutoffPoint::Scalar(x)) => Ok(varphi_n(n, x)),
        (CutoffSpec::PsiH(h), CutoffPoint::Pair(xi, mu)) => Ok(psi_h(h, xi, mu, p)),
        (spec, pt) => Err(BozkError::InvalidParameter(format!(
            "cutoff {spec:?} cannot be evaluated at {pt:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn chi_plateau_and_support() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(4.0 / 3.0), 1.0);
        assert_eq!(chi(-1.3), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert_eq!(chi(5.0 / 3.0), 0.0);
        assert!(chi(1.5) > 0.0 && chi(1.5) < 1.0);
        assert!((chi(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn varphi_at_one() {
        assert_eq!(varphi(1.0), 1.0);
        assert_eq!(varphi(0.5), 0.0);
        assert_eq!(varphi(1.7), 0.0);
    }

    #[test]
    fn telescoping_partition_of_unity() {
        let top = 20;
        for &x in &[0.0, 0.3, 0.9, 1.4, 1.6, 3.7, 100.0, 12345.6, (1u64 << 18) as f64] {
            let s: f64 = (0..=top)
                .map(|k| varphi_n(DyadicIndex::from_exp(k), x))
                .sum();
            assert!((s - 1.0).abs() < 1e-12, "x = {x}: {s}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for &x in &[1.35, 1.5, 1.62, -1.45, 0.8, 1.2, 0.7] {
            let h = 1e-6;
            let fd = (chi(x + h) - chi(x - h)) / (2.0 * h);
            assert!((fd - chi_deriv(x)).abs() < 1e-6, "chi' at {x}");
            let fd = (varphi(x + h) - varphi(x - h)) / (2.0 * h);
            assert!((fd - varphi_deriv(x)).abs() < 1e-6, "varphi' at {x}");
        }
    }

    #[test]
    fn rho_profile() {
        assert_eq!(rho(0.0), 0.0);
        assert_eq!(rho(0.5), 0.0);
        assert_eq!(rho(1.0), 1.0);
        assert_eq!(rho(-3.0), 1.0);
        assert_eq!(rho_delta(0.0, 0.1), 0.0);
    }

    #[test]
    fn cutoff_eval_dispatch() {
        let p = DispersionParams::new(2.0).unwrap();
        assert_eq!(cutoff_eval(CutoffSpec::Chi, 0.0, &p).unwrap(), 1.0);
        let h = DyadicIndex::new(2).unwrap();
        assert_eq!(cutoff_eval(CutoffSpec::PsiH(h), (1.0, 1.0), &p).unwrap(), 1.0);
        assert!(cutoff_eval(CutoffSpec::PsiH(h), 1.0, &p).is_err());
    }

    proptest! {
        #[test]
        fn cutoffs_bounded(x in -10.0f64..10.0) {
            for v in [chi(x), rho(x), smoothstep(x)] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!((-1.0..=1.0).contains(&varphi(x)));
            prop_assert!(varphi(x) >= 0.0);
        }
    }
}
