use crate::error::{BozkError, Result};

/// Dispersion exponent `alpha` together with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionParams {
    alpha: f64,
}

impl DispersionParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(1.0..=2.0).contains(&alpha) {
            return Err(BozkError::InvalidParameter(format!(
                "alpha = {alpha} violates alpha ∈ [1,2]"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `B = alpha (alpha + 1) / 2`, the slope of the critical curve `mu^2 = B |xi|^alpha`.
    pub fn b(&self) -> f64 {
        self.alpha * (self.alpha + 1.0) / 2.0
    }

    /// `beta = 2 / alpha - 1`.
    pub fn beta(&self) -> f64 {
        2.0 / self.alpha - 1.0
    }

    /// `s_alpha = 2 / alpha - 3 / 4`.
    pub fn s_alpha(&self) -> f64 {
        2.0 / self.alpha - 0.75
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants() {
        let p = DispersionParams::new(1.0).unwrap();
        assert_eq!(p.b(), 1.0);
        assert_eq!(p.beta(), 1.0);
        assert_eq!(p.s_alpha(), 1.25);
        let p = DispersionParams::new(2.0).unwrap();
        assert_eq!(p.b(), 3.0);
        assert_eq!(p.beta(), 0.0);
        assert_eq!(p.s_alpha(), 0.25);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(DispersionParams::new(2.5).is_err());
        assert!(DispersionParams::new(0.99).is_err());
        assert!(DispersionParams::new(f64::NAN).is_err());
    }
}
