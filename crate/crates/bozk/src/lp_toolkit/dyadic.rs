use crate::error::{BozkError, Result};

/// A dyadic number `2^k`, `k >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicIndex(u64);

impl DyadicIndex {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 || !value.is_power_of_two() {
            return Err(BozkError::InvalidParameter(format!(
                "{value} is not a dyadic number"
            )));
        }
        Ok(Self(value))
    }

    pub fn from_exp(k: u32) -> Self {
        Self(1u64 << k)
    }

    pub fn value(&self) -> u64 {
        self.0
    }

    pub fn exp(&self) -> u32 {
        self.0.trailing_zeros()
    }

    pub fn as_f64(&self) -> f64 {
        self.0 as f64
    }
}

/// `floor(H^beta)` in the dyadic sense: `2^{[beta k]}` for `H = 2^k`.
///
/// A `1e-9` guard absorbs rounding in `beta` so that exact products such as
/// `beta k = 3` are not floored to 2.
pub fn dyadic_floor(h: DyadicIndex, beta: f64) -> Result<DyadicIndex> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(BozkError::InvalidParameter(format!("beta = {beta} must be >= 0")));
    }
    let e = (beta * h.exp() as f64 + 1e-9).floor();
    if e > 62.0 {
        return Err(BozkError::InvalidParameter("dyadic overflow".into()));
    }
    Ok(DyadicIndex::from_exp(e as u32))
}

/// Dyadic numbers `lo, 2 lo, ..., hi` (both dyadic, inclusive).
pub fn dyadic_range(lo: DyadicIndex, hi: DyadicIndex) -> Vec<DyadicIndex> {
    (lo.exp()..=hi.exp()).map(DyadicIndex::from_exp).collect()
}
