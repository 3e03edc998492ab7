use crate::error::{BozkError, Result};

/// One sweep point: the swept value `x`, all producing parameters, the
/// measured quantity, the claimed bound (implicit constant 1) and their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    pub params: Vec<(String, f64)>,
    pub measured: f64,
    pub bound: f64,
    pub ratio: f64,
}

impl SweepPoint {
    pub fn new(x: f64, params: Vec<(String, f64)>, measured: f64, bound: f64) -> Self {
        Self {
            x,
            params,
            measured,
            bound,
            ratio: measured / bound,
        }
    }
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when the data are exactly linear.
    pub r_squared: f64,
    /// Root-mean-square residual in log space.
    pub residual_rms: f64,
    pub points: usize,
}

/// Which column of the sweep the slope is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitTarget {
    Measured,
    Ratio,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub experiment: String,
    /// Name of the swept parameter.
    pub x_name: String,
    pub points: Vec<SweepPoint>,
    pub fit_target: FitTarget,
    pub fit: SlopeFit,
    /// Set when a quadrature or resolution check failed on some point.
    pub flagged: bool,
    pub notes: Vec<String>,
}

impl SweepResult {
    /// Sorts the points by `x` and fits the requested column.
    pub fn build(
        experiment: &str,
        x_name: &str,
        mut points: Vec<SweepPoint>,
        fit_target: FitTarget,
        flagged: bool,
        notes: Vec<String>,
    ) -> Result<Self> {
        points.sort_by(|a, b| a.x.total_cmp(&b.x));
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points
            .iter()
            .map(|p| match fit_target {
                FitTarget::Measured => p.measured,
                FitTarget::Ratio => p.ratio,
            })
            .collect();
        let fit = fit_loglog(&xs, &ys)?;
        Ok(Self {
            experiment: experiment.to_string(),
            x_name: x_name.to_string(),
            points,
            fit_target,
            fit,
            flagged,
            notes,
        })
    }

    pub fn max_ratio(&self) -> f64 {
        self.points.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Fits `ln y = slope ln x + intercept`. Needs two distinct positive `x`
/// and positive `y`.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    if x.len() != y.len() {
        return Err(BozkError::InvalidParameter(format!(
            "fit needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(BozkError::Empty("slope fit needs at least two points"));
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(BozkError::NonFinite("log-log fit requires positive finite data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(BozkError::InvalidParameter("slope fit needs distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| {
            let r = b - (slope * a + intercept);
            r * r
        })
        .sum();
    let ss_tot: f64 = ly.iter().map(|b| (b - my) * (b - my)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        residual_rms: (ss_res / n).sqrt(),
        points: lx.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.75)).collect();
        let f = fit_loglog(&x, &y).unwrap();
        assert!((f.slope + 0.75).abs() < 1e-14);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
        assert!(f.residual_rms < 1e-14);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_loglog(&[1.0], &[1.0]).is_err());
        assert!(fit_loglog(&[2.0, 2.0], &[1.0, 3.0]).is_err());
        assert!(fit_loglog(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(fit_loglog(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn build_sorts_points() {
        let pts = vec![
            SweepPoint::new(4.0, vec![], 16.0, 4.0),
            SweepPoint::new(1.0, vec![], 1.0, 1.0),
            SweepPoint::new(2.0, vec![], 4.0, 2.0),
        ];
        let r = SweepResult::build("t", "x", pts, FitTarget::Ratio, false, vec![]).unwrap();
        assert_eq!(r.points[0].x, 1.0);
        assert!((r.fit.slope - 1.0).abs() < 1e-14);
        assert_eq!(r.max_ratio(), 4.0);
    }

    proptest! {
        #[test]
        fn slope_is_scale_invariant(c in 0.1f64..10.0, s in -2.0f64..2.0, noise in 0.0f64..0.1) {
            let x = [1.0f64, 3.0, 9.0, 27.0, 81.0];
            let y: Vec<f64> = x.iter().enumerate()
                .map(|(i, v)| v.powf(s) * (1.0 + noise * ((i % 2) as f64 - 0.5)))
                .collect();
            let yc: Vec<f64> = y.iter().map(|v| c * v).collect();
            let a = fit_loglog(&x, &y).unwrap();
            let b = fit_loglog(&x, &yc).unwrap();
            prop_assert!((a.slope - b.slope).abs() < 1e-12);
            prop_assert!((a.r_squared - b.r_squared).abs() < 1e-9);
        }
    }
}
