use super::params::DispersionParams;

/// A frequency `(xi, mu)`.
pub type Zeta = (f64, f64);

/// `|x|^a` with the convention `0^0 = 1`.
#[inline]
pub fn abs_pow(x: f64, a: f64) -> f64 {
    if a == 1.0 {
        x.abs()
    } else if a == 2.0 {
        x * x
    } else {
        x.abs().powf(a)
    }
}

/// Dispersion relation `omega = xi (|xi|^alpha + mu^2)`.
#[inline]
pub fn eval_omega(xi: f64, mu: f64, p: &DispersionParams) -> f64 {
    xi * (abs_pow(xi, p.alpha()) + mu * mu)
}

/// `h = d omega / d xi = (alpha + 1) |xi|^alpha + mu^2`.
#[inline]
pub fn eval_h(xi: f64, mu: f64, p: &DispersionParams) -> f64 {
    (p.alpha() + 1.0) * abs_pow(xi, p.alpha()) + mu * mu
}

/// Resonance function `omega(z1 + z2) - omega(z1) - omega(z2)`.
///
/// The two single-frequency terms are added in a fixed symmetric order so
/// the result is exactly symmetric under `z1 <-> z2`.
#[inline]
pub fn eval_resonance(z1: Zeta, z2: Zeta, p: &DispersionParams) -> f64 {
    let w1 = eval_omega(z1.0, z1.1, p);
    let w2 = eval_omega(z2.0, z2.1, p);
    eval_omega(z1.0 + z2.0, z1.1 + z2.1, p) - (w1 + w2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pa(a: f64) -> DispersionParams {
        DispersionParams::new(a).unwrap()
    }

    #[test]
    fn omega_examples() {
        assert_eq!(eval_omega(1.0, 0.0, &pa(1.3)), 1.0);
        assert_eq!(eval_omega(2.0, 1.0, &pa(1.0)), 6.0);
        let p = pa(1.5);
        assert_eq!(eval_omega(-1.3, 0.7, &p), -eval_omega(1.3, -0.7, &p));
    }

    #[test]
    fn h_examples() {
        assert_eq!(eval_h(0.0, 0.0, &pa(1.5)), 0.0);
        assert_eq!(eval_h(1.0, 2.0, &pa(2.0)), 7.0);
        assert_eq!(eval_h(-1.0, 2.0, &pa(2.0)), 7.0);
    }

    #[test]
    fn resonance_examples() {
        let p = pa(2.0);
        assert_eq!(eval_resonance((1.0, 0.0), (1.0, 0.0), &p), 6.0);
        let p = pa(1.0);
        let z = (0.7, -1.9);
        assert_eq!(eval_resonance(z, (-z.0, -z.1), &p), 0.0);
        let direct = eval_omega(3.5, 0.5, &p) - eval_omega(0.5, 1.0, &p) - eval_omega(3.0, -0.5, &p);
        let r = eval_resonance((0.5, 1.0), (3.0, -0.5), &p);
        assert!((r - direct).abs() < 1e-12 * direct.abs().max(1.0));
    }
}
