//! Sampling check of the resonance-geometry inequality
//! `h(z1 + z2) <= |h(z1) - h(z2)| + f(delta) max(h(z1), h(z2))`
//! for `z1, z2` in `A_delta` with `xi1 xi2 < 0` and `mu1 mu2 < 0`.

use rand::Rng;

use crate::error::{BozkError, Result};
use crate::rng::substream;
use crate::spectral_core::{abs_pow, eval_h, DispersionParams, Zeta};

/// Sampling measure, stated in every report.
pub const SAMPLING_HEADER: &str = "|xi| log-uniform on [1e-2, 1e4]; mu^2 uniform on \
[(B - delta)|xi|^alpha, (B + delta)|xi|^alpha]; xi1 xi2 < 0 and mu1 mu2 < 0 with \
independent fair signs";

const XI_LO: f64 = 1e-2;
const XI_HI: f64 = 1e4;
/// Relative slack allowed for roundoff, in units of `max(h1, h2)`.
const ROUNDOFF: f64 = 1e-12;

/// The constant `f = f1 + f2 + f3` and its pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TechConstants {
    pub g: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f: f64,
}

/// `g = (a + 1 + B + d) / (a + 1 + B - d)`, `f1 = B + d - (B - d) / g^{1/2}`,
/// `f2 = (g^{1/a} - 1)^a`, `f3 = g - 1`.
pub fn tech_constants(delta: f64, p: &DispersionParams) -> Result<TechConstants> {
    let b = p.b();
    if !(delta > 0.0 && delta < 1.0 && delta < b) {
        return Err(BozkError::InvalidParameter(format!(
            "delta = {delta} must lie in (0, min(1, B))"
        )));
    }
    let a = p.alpha();
    let g = (a + 1.0 + b + delta) / (a + 1.0 + b - delta);
    let f1 = b + delta - (b - delta) / g.sqrt();
    let f2 = (g.powf(1.0 / a) - 1.0).powf(a);
    let f3 = g - 1.0;
    Ok(TechConstants {
        g,
        f1,
        f2,
        f3,
        f: f1 + f2 + f3,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TechReport {
    pub header: &'static str,
    pub alpha: f64,
    pub delta: f64,
    pub seed: u64,
    pub constants: TechConstants,
    pub samples: usize,
    pub violations: usize,
    /// Largest `h(z1 + z2) / (|h1 - h2| + f max(h1, h2))`.
    pub max_slack_ratio: f64,
    pub worst_pair: (Zeta, Zeta),
}

/// Both sides of the inequality for one pair.
pub fn tech_sides(z1: Zeta, z2: Zeta, f: f64, p: &DispersionParams) -> (f64, f64) {
    let h1 = eval_h(z1.0, z1.1, p);
    let h2 = eval_h(z2.0, z2.1, p);
    let lhs = eval_h(z1.0 + z2.0, z1.1 + z2.1, p);
    (lhs, (h1 - h2).abs() + f * h1.max(h2))
}

fn sample_point<R: Rng>(rng: &mut R, delta: f64, p: &DispersionParams) -> (f64, f64) {
    let xi = (XI_LO.ln() + rng.random::<f64>() * (XI_HI / XI_LO).ln()).exp();
    let w = abs_pow(xi, p.alpha());
    let b = p.b();
    let mu2 = (b - delta) * w + rng.random::<f64>() * 2.0 * delta * w;
    (xi, mu2.sqrt())
}

/// Draws `samples` admissible pairs and counts violations.
pub fn lemma_tech_check(
    delta: f64,
    p: &DispersionParams,
    samples: usize,
    seed: u64,
) -> Result<TechReport> {
    let c = tech_constants(delta, p)?;
    if samples == 0 {
        return Err(BozkError::Empty("lemma check needs at least one admissible sample"));
    }
    let mut rng = substream(seed, 0);
    let mut violations = 0;
    let mut worst = (f64::NEG_INFINITY, ((0.0, 0.0), (0.0, 0.0)));
    for _ in 0..samples {
        let (x1, m1) = sample_point(&mut rng, delta, p);
        let (x2, m2) = sample_point(&mut rng, delta, p);
        let sx = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let sm = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let z1 = (sx * x1, sm * m1);
        let z2 = (-sx * x2, -sm * m2);
        let (lhs, rhs) = tech_sides(z1, z2, c.f, p);
        let scale = eval_h(z1.0, z1.1, p).max(eval_h(z2.0, z2.1, p));
        if lhs > rhs + ROUNDOFF * scale {
            violations += 1;
        }
        let r = lhs / rhs;
        if r > worst.0 {
            worst = (r, (z1, z2));
        }
    }
    Ok(TechReport {
        header: SAMPLING_HEADER,
        alpha: p.alpha(),
        delta,
        seed,
        constants: c,
        samples,
        violations,
        max_slack_ratio: worst.0,
        worst_pair: worst.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constants_match_extended_precision() {
        // Frozen from a 50-digit evaluation of the closed forms.
        let c = tech_constants(0.1, &DispersionParams::new(1.0).unwrap()).unwrap();
        assert!((c.g - 1.0689655172413793).abs() < 1e-15);
        assert!((c.f1 - 0.22951626351558356).abs() < 1e-15);
        assert!((c.f2 - 0.06896551724137931).abs() < 1e-15);
        assert!((c.f3 - 0.06896551724137931).abs() < 1e-15);
        assert!((c.f - 0.36744729799834218).abs() < 1e-15);
    }

    #[test]
    fn no_violations_small_run() {
        for &a in &[1.0, 1.5, 2.0] {
            let p = DispersionParams::new(a).unwrap();
            let r = lemma_tech_check(0.1, &p, 20_000, 3).unwrap();
            assert_eq!(r.violations, 0, "alpha {a}");
            assert!(r.max_slack_ratio <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let p = DispersionParams::new(1.0).unwrap();
        assert!(lemma_tech_check(0.0, &p, 10, 0).is_err());
        assert!(lemma_tech_check(1.0, &p, 10, 0).is_err());
        assert!(lemma_tech_check(0.1, &p, 0, 0).is_err());
    }

    proptest! {
        #[test]
        fn mirrored_pair_is_identical(x1 in 0.01f64..100.0, x2 in 0.01f64..100.0, m1 in 0.0f64..50.0, m2 in 0.0f64..50.0, a in 1.0f64..=2.0) {
            let p = DispersionParams::new(a).unwrap();
            let f = tech_constants(0.1, &p).unwrap().f;
            let (z1, z2) = ((x1, m1), (-x2, -m2));
            let s = tech_sides(z1, z2, f, &p);
            let t = tech_sides((-x1, -m1), (x2, m2), f, &p);
            prop_assert_eq!(s, t);
        }
    }
}
