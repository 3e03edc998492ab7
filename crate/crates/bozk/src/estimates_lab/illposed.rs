//! Norm-inflation construction: data made of four thin frequency boxes and
//! the second Picard iterate `I_N(t) = int_0^t U(t - t')[U(t') f_N d_x U(t') f_N] dt'`.
//!
//! Box widths are `gamma = N^{-(alpha + delta)}` in `xi` and `~gamma^eps` in
//! `mu`, far below any global lattice spacing at interesting `N`, so norms
//! are computed on a box representation with tensor Gauss panels. In
//! Fourier variables
//!
//! ```text
//! F(I_N)(t, zeta) = e^{i t omega(zeta)} xi sum_{a, b} c_a c_b
//!                   int_{zeta1 in Q_a, zeta - zeta1 in Q_b} (e^{i t Omega} - 1) / Omega d zeta1
//! ```
//!
//! up to a unimodular constant; only the modulus enters the norms.

use ndarray::Array2;
use num_complex::Complex64;

use super::sweep::{FitTarget, SweepPoint, SweepResult};
use crate::error::{BozkError, Result};
use crate::lp_toolkit::japanese;
use crate::quadrature::composite_nodes;
use crate::spectral_core::{abs_pow, DispersionParams, Grid2D, SpectralField2D, Zeta};

/// Axis-aligned closed box `[xi_lo, xi_hi] x [mu_lo, mu_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyBox {
    pub xi_lo: f64,
    pub xi_hi: f64,
    pub mu_lo: f64,
    pub mu_hi: f64,
}

impl FrequencyBox {
    pub fn new(xi_lo: f64, xi_hi: f64, mu_lo: f64, mu_hi: f64) -> Result<Self> {
        let all = [xi_lo, xi_hi, mu_lo, mu_hi];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(BozkError::NonFinite("FrequencyBox"));
        }
        if !(xi_lo < xi_hi && mu_lo < mu_hi) {
            return Err(BozkError::InvalidParameter(format!(
                "box [{xi_lo}, {xi_hi}] x [{mu_lo}, {mu_hi}] needs lo < hi"
            )));
        }
        Ok(Self {
            xi_lo,
            xi_hi,
            mu_lo,
            mu_hi,
        })
    }

    pub fn area(&self) -> f64 {
        (self.xi_hi - self.xi_lo) * (self.mu_hi - self.mu_lo)
    }

    pub fn contains(&self, xi: f64, mu: f64) -> bool {
        (self.xi_lo..=self.xi_hi).contains(&xi) && (self.mu_lo..=self.mu_hi).contains(&mu)
    }

    pub fn neg(&self) -> Self {
        Self {
            xi_lo: -self.xi_hi,
            xi_hi: -self.xi_lo,
            mu_lo: -self.mu_hi,
            mu_hi: -self.mu_lo,
        }
    }

    /// `{z1 in self : z - z1 in other}`, when it has positive area.
    fn fiber(&self, other: &FrequencyBox, z: Zeta) -> Option<FrequencyBox> {
        let xl = self.xi_lo.max(z.0 - other.xi_hi);
        let xh = self.xi_hi.min(z.0 - other.xi_lo);
        let ml = self.mu_lo.max(z.1 - other.mu_hi);
        let mh = self.mu_hi.min(z.1 - other.mu_lo);
        (xl < xh && ml < mh).then_some(FrequencyBox {
            xi_lo: xl,
            xi_hi: xh,
            mu_lo: ml,
            mu_hi: mh,
        })
    }
}

/// Parameters of the construction. `gamma = N^{-(alpha + delta)}` is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IllposedParams {
    pub n: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub s: f64,
    pub p: DispersionParams,
}

impl IllposedParams {
    pub fn new(n: f64, epsilon: f64, delta: f64, s: f64, p: DispersionParams) -> Result<Self> {
        if !(n.is_finite() && n >= 2.0) {
            return Err(BozkError::InvalidParameter(format!("N = {n} must be >= 2")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(BozkError::InvalidParameter(format!("epsilon = {epsilon} must lie in (0, 1)")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(BozkError::InvalidParameter(format!("delta = {delta} must be > 0")));
        }
        if !s.is_finite() {
            return Err(BozkError::NonFinite("s"));
        }
        let ip = Self {
            n,
            epsilon,
            delta,
            s,
            p,
        };
        let g = ip.gamma();
        if !(g < 1.0 && g.powf(epsilon) <= 2.0) {
            return Err(BozkError::InvalidParameter(format!(
                "gamma = {g} must satisfy gamma < 1 and gamma^eps <= 2"
            )));
        }
        Ok(ip)
    }

    pub fn gamma(&self) -> f64 {
        self.n.powf(-(self.p.alpha() + self.delta))
    }

    /// Growth exponent `2 - alpha - eps (alpha + delta) - delta` of `||I_N||^2`.
    pub fn predicted_exponent(&self) -> f64 {
        let a = self.p.alpha();
        2.0 - a - self.epsilon * (a + self.delta) - self.delta
    }

    /// `Q1+ = [gamma/2, gamma] x [gamma^eps, 2 gamma^eps]` and
    /// `Q2+ = [N, N + gamma] x [-gamma^eps, -gamma^eps/2]`.
    pub fn boxes(&self) -> (FrequencyBox, FrequencyBox) {
        let g = self.gamma();
        let ge = g.powf(self.epsilon);
        (
            FrequencyBox {
                xi_lo: g / 2.0,
                xi_hi: g,
                mu_lo: ge,
                mu_hi: 2.0 * ge,
            },
            FrequencyBox {
                xi_lo: self.n,
                xi_hi: self.n + g,
                mu_lo: -ge,
                mu_hi: -ge / 2.0,
            },
        )
    }

    /// Amplitudes `gamma^{-(1+eps)/2}` on `Q1+-` and `gamma^{-(1+eps)/2} N^{-alpha s}` on `Q2+-`.
    pub fn amplitudes(&self) -> (f64, f64) {
        let a1 = self.gamma().powf(-(1.0 + self.epsilon) / 2.0);
        (a1, a1 * self.n.powf(-self.p.alpha() * self.s))
    }
}

/// Piecewise-constant spectrum on disjoint boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSpectrum {
    pub pieces: Vec<(FrequencyBox, f64)>,
}

impl BoxSpectrum {
    /// `||f||_{E^s}^2 = sum c^2 int_box <|xi|^alpha + mu^2>^{2s}` by tensor Gauss.
    pub fn es_norm_sq(&self, s: f64, p: &DispersionParams, panels: usize, order: usize) -> f64 {
        self.pieces
            .iter()
            .map(|(b, c)| {
                let (xs, wx) = composite_nodes(b.xi_lo, b.xi_hi, panels, order);
                let (ms, wm) = composite_nodes(b.mu_lo, b.mu_hi, panels, order);
                let mut acc = 0.0;
                for (x, w1) in xs.iter().zip(&wx) {
                    for (m, w2) in ms.iter().zip(&wm) {
                        acc += w1 * w2 * es_weight(*x, *m, s, p);
                    }
                }
                c * c * acc
            })
            .sum()
    }

    pub fn value(&self, xi: f64, mu: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|(b, _)| b.contains(xi, mu))
            .map(|(_, c)| c)
            .sum()
    }
}

fn es_weight(xi: f64, mu: f64, s: f64, p: &DispersionParams) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        japanese(abs_pow(xi, p.alpha()) + mu * mu).powf(2.0 * s)
    }
}

/// Spectrum of `f_N` on `Q1+-` and `Q2+-`.
pub fn illposed_spectrum(ip: &IllposedParams) -> BoxSpectrum {
    let (q1, q2) = ip.boxes();
    let (a1, a2) = ip.amplitudes();
    BoxSpectrum {
        pieces: vec![(q1, a1), (q1.neg(), a1), (q2, a2), (q2.neg(), a2)],
    }
}

/// `f_N` sampled on a global lattice. Needs `dxi <= gamma/8`, `dmu <= gamma^eps/8`
/// and the boxes strictly inside the Nyquist range.
pub fn illposed_data(ip: &IllposedParams, grid: Grid2D) -> Result<SpectralField2D> {
    let g = ip.gamma();
    let ge = g.powf(ip.epsilon);
    let xi_nyq = grid.nx() as f64 / 2.0 * grid.dxi();
    let mu_nyq = grid.ny() as f64 / 2.0 * grid.dmu();
    if grid.dxi() > g / 8.0 || grid.dmu() > ge / 8.0 {
        return Err(BozkError::Unresolvable(format!(
            "lattice spacing ({:.3e}, {:.3e}) exceeds (gamma/8, gamma^eps/8) = ({:.3e}, {:.3e})",
            grid.dxi(),
            grid.dmu(),
            g / 8.0,
            ge / 8.0
        )));
    }
    if xi_nyq <= ip.n + g || mu_nyq <= 2.0 * ge {
        return Err(BozkError::Unresolvable(format!(
            "boxes reach ({:.3e}, {:.3e}) beyond the Nyquist range ({xi_nyq:.3e}, {mu_nyq:.3e})",
            ip.n + g,
            2.0 * ge
        )));
    }
    let spec = illposed_spectrum(ip);
    let coeffs = Array2::from_shape_fn(grid.shape(), |(j, k)| {
        Complex64::new(spec.value(grid.xi_at(j), grid.mu_at(k)), 0.0)
    });
    SpectralField2D::new(grid, coeffs, true)
}

/// `Omega(z1, z2) = omega(z1 + z2) - omega(z1) - omega(z2)` without the
/// cancellation of the naive form when `|xi|` is large.
pub fn resonance_stable(z1: Zeta, z2: Zeta, p: &DispersionParams) -> f64 {
    let a = p.alpha();
    let wx = |x: f64| x * abs_pow(x, a);
    let (big, small) = if z1.0.abs() >= z2.0.abs() { (z1.0, z2.0) } else { (z2.0, z1.0) };
    let dispersive = if big == 0.0 {
        0.0
    } else {
        wx(big) * ((a + 1.0) * (small / big).ln_1p()).exp_m1() - wx(small)
    };
    let (x1, m1, x2, m2) = (z1.0, z1.1, z2.0, z2.1);
    dispersive + x1 * m2 * (2.0 * m1 + m2) + x2 * m1 * (m1 + 2.0 * m2)
}

/// `(e^{i t Omega} - 1) / Omega`, with the limit `i t` for `|Omega| < 1e-12`.
pub fn duhamel_kernel(omega: f64, t: f64) -> Complex64 {
    if omega.abs() < 1e-12 {
        return Complex64::new(0.0, t);
    }
    let h = (0.5 * t * omega).sin();
    Complex64::new(-2.0 * h * h / omega, (t * omega).sin() / omega)
}

/// Panels and Gauss order of the inner (`zeta1`) and outer (`zeta`) rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardQuadrature {
    pub order: usize,
    pub inner_panels: usize,
    pub outer_panels: usize,
}

impl Default for PicardQuadrature {
    fn default() -> Self {
        Self {
            order: 6,
            inner_panels: 2,
            outer_panels: 2,
        }
    }
}

impl PicardQuadrature {
    fn doubled(&self) -> Self {
        Self {
            order: self.order,
            inner_panels: 2 * self.inner_panels,
            outer_panels: 2 * self.outer_panels,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardIterate {
    pub t: f64,
    pub es_norm: f64,
    /// Relative change of the norm under panel doubling.
    pub doubling_change: f64,
    pub flagged: bool,
    /// `(min, max)` of `|Omega| / (gamma N^alpha)` over the low-high nodes.
    pub omega_band: (f64, f64),
    /// Largest `|t Omega|` over all nodes.
    pub max_phase: f64,
    /// Output cells integrated.
    pub cells: usize,
}

struct Pass {
    norm_sq: f64,
    band: (f64, f64),
    max_phase: f64,
    cells: usize,
}

/// Sorted breakpoints with near-duplicates merged.
fn breakpoints(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        match out.last() {
            Some(&l) if (x - l).abs() <= 1e-13 * (1.0 + x.abs()) => {}
            _ => out.push(x),
        }
    }
    out
}

fn iterate_pass(
    ip: &IllposedParams,
    t: f64,
    pairs: &[(FrequencyBox, FrequencyBox, f64, bool)],
    q: &PicardQuadrature,
) -> Pass {
    let p = &ip.p;
    let scale = ip.gamma() * ip.n.powf(p.alpha());
    let xb = breakpoints(
        pairs
            .iter()
            .flat_map(|(a, b, _, _)| {
                [a.xi_lo + b.xi_lo, a.xi_lo + b.xi_hi, a.xi_hi + b.xi_lo, a.xi_hi + b.xi_hi]
            })
            .collect(),
    );
    let mb = breakpoints(
        pairs
            .iter()
            .flat_map(|(a, b, _, _)| {
                [a.mu_lo + b.mu_lo, a.mu_lo + b.mu_hi, a.mu_hi + b.mu_lo, a.mu_hi + b.mu_hi]
            })
            .collect(),
    );
    let mut pass = Pass {
        norm_sq: 0.0,
        band: (f64::INFINITY, 0.0),
        max_phase: 0.0,
        cells: 0,
    };
    for xw in xb.windows(2) {
        for mw in mb.windows(2) {
            let centre = (0.5 * (xw[0] + xw[1]), 0.5 * (mw[0] + mw[1]));
            let live: Vec<_> = pairs
                .iter()
                .filter(|(a, b, _, _)| a.fiber(b, centre).is_some())
                .collect();
            if live.is_empty() {
                continue;
            }
            pass.cells += 1;
            let (xs, wx) = composite_nodes(xw[0], xw[1], q.outer_panels, q.order);
            let (ms, wm) = composite_nodes(mw[0], mw[1], q.outer_panels, q.order);
            for (xi, w1) in xs.iter().zip(&wx) {
                for (mu, w2) in ms.iter().zip(&wm) {
                    let z = (*xi, *mu);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (a, b, c, lowhigh) in &live {
                        let Some(r) = a.fiber(b, z) else { continue };
                        let (x1s, v1) = composite_nodes(r.xi_lo, r.xi_hi, q.inner_panels, q.order);
                        let (m1s, v2) = composite_nodes(r.mu_lo, r.mu_hi, q.inner_panels, q.order);
                        let mut j = Complex64::new(0.0, 0.0);
                        for (x1, u1) in x1s.iter().zip(&v1) {
                            for (m1, u2) in m1s.iter().zip(&v2) {
                                let om = resonance_stable((*x1, *m1), (xi - x1, mu - m1), p);
                                pass.max_phase = pass.max_phase.max((t * om).abs());
                                if *lowhigh {
                                    let r = om.abs() / scale;
                                    pass.band = (pass.band.0.min(r), pass.band.1.max(r));
                                }
                                j += duhamel_kernel(om, t) * (u1 * u2);
                            }
                        }
                        acc += j * *c;
                    }
                    pass.norm_sq += w1 * w2 * es_weight(*xi, *mu, ip.s, p) * (xi * xi) * acc.norm_sqr();
                }
            }
        }
    }
    pass
}

/// `||I_N(t)||_{E^s}` on the box representation; panel doubling decides `flagged`.
pub fn picard_second_iterate(
    ip: &IllposedParams,
    t: f64,
    restrict_lowhigh: bool,
    quad: &PicardQuadrature,
) -> Result<PicardIterate> {
    if t == 0.0 || !t.is_finite() {
        return Err(BozkError::InvalidParameter(format!("t = {t} must be finite and nonzero")));
    }
    if quad.order == 0 || quad.inner_panels == 0 || quad.outer_panels == 0 {
        return Err(BozkError::InvalidParameter("quadrature sizes must be >= 1".into()));
    }
    let (q1, q2) = ip.boxes();
    let (a1, a2) = ip.amplitudes();
    let pairs: Vec<(FrequencyBox, FrequencyBox, f64, bool)> = if restrict_lowhigh {
        vec![(q1, q2, a1 * a2, true)]
    } else {
        let all = [(q1, a1), (q1.neg(), a1), (q2, a2), (q2.neg(), a2)];
        let mut v = Vec::with_capacity(16);
        for (i, (ba, ca)) in all.iter().enumerate() {
            for (j, (bb, cb)) in all.iter().enumerate() {
                v.push((*ba, *bb, ca * cb, i == 0 && j == 2));
            }
        }
        v
    };
    let coarse = iterate_pass(ip, t, &pairs, quad);
    let fine = iterate_pass(ip, t, &pairs, &quad.doubled());
    let (n1, n2) = (coarse.norm_sq.sqrt(), fine.norm_sq.sqrt());
    if !(n2.is_finite() && n1.is_finite()) {
        return Err(BozkError::NonFinite("Picard iterate norm"));
    }
    let change = if n2 > 0.0 { (n2 - n1).abs() / n2 } else { 0.0 };
    Ok(PicardIterate {
        t,
        es_norm: n2,
        doubling_change: change,
        flagged: change > 0.01,
        omega_band: fine.band,
        max_phase: fine.max_phase,
        cells: fine.cells,
    })
}

fn iterate_params(ip: &IllposedParams, r: &PicardIterate) -> Vec<(String, f64)> {
    vec![
        ("alpha".into(), ip.p.alpha()),
        ("N".into(), ip.n),
        ("gamma".into(), ip.gamma()),
        ("epsilon".into(), ip.epsilon),
        ("delta".into(), ip.delta),
        ("s".into(), ip.s),
        ("t".into(), r.t),
        ("doubling_change".into(), r.doubling_change),
        ("omega_band_min".into(), r.omega_band.0),
        ("omega_band_max".into(), r.omega_band.1),
        ("max_phase".into(), r.max_phase),
    ]
}

/// `||I_N(t)||^2_{E^s}` over `ns` (low-high interaction), fitted against
/// `N`; the bound column is `N^{2 - alpha - eps (alpha + delta) - delta}`.
pub fn inflation_sweep(
    alpha: f64,
    s: f64,
    epsilon: f64,
    delta: f64,
    ns: &[f64],
    t: f64,
    quad: &PicardQuadrature,
) -> Result<SweepResult> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(BozkError::InvalidParameter(format!(
            "alpha = {alpha} violates alpha ∈ [1,2) for the inflation construction"
        )));
    }
    let p = DispersionParams::new(alpha)?;
    let mut points = Vec::with_capacity(ns.len());
    let mut flagged = false;
    let mut notes = Vec::new();
    let mut expo = 0.0;
    for &n in ns {
        let ip = IllposedParams::new(n, epsilon, delta, s, p)?;
        expo = ip.predicted_exponent();
        let r = picard_second_iterate(&ip, t, true, quad)?;
        if r.flagged {
            flagged = true;
            notes.push(format!("N = {n}: panel doubling changed the norm by {:.2e}", r.doubling_change));
        }
        points.push(SweepPoint::new(n, iterate_params(&ip, &r), r.es_norm * r.es_norm, n.powf(expo)));
    }
    notes.push(format!("predicted exponent {expo:.6}"));
    SweepResult::build("inflation", "N", points, FitTarget::Measured, flagged, notes)
}

/// `||I_N(t)||_{E^s}` over `times` at fixed parameters, fitted against `t`.
pub fn inflation_time_sweep(
    ip: &IllposedParams,
    times: &[f64],
    quad: &PicardQuadrature,
) -> Result<SweepResult> {
    let mut points = Vec::with_capacity(times.len());
    let mut flagged = false;
    for &t in times {
        if t <= 0.0 {
            return Err(BozkError::InvalidParameter(format!("time {t} must be > 0")));
        }
        let r = picard_second_iterate(ip, t, true, quad)?;
        flagged |= r.flagged;
        points.push(SweepPoint::new(t, iterate_params(ip, &r), r.es_norm, t));
    }
    SweepResult::build("inflation-time", "t", points, FitTarget::Measured, flagged, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::{eval_resonance, inverse_transform_complex};
    use proptest::prelude::*;

    fn ip(n: f64, a: f64) -> IllposedParams {
        IllposedParams::new(n, 0.05, 0.05, 0.5, DispersionParams::new(a).unwrap()).unwrap()
    }

    #[test]
    fn box_validation() {
        assert!(FrequencyBox::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(FrequencyBox::new(0.0, f64::NAN, 0.0, 1.0).is_err());
        let b = FrequencyBox::new(0.0, 2.0, -1.0, 1.0).unwrap();
        assert_eq!(b.area(), 4.0);
        assert!(b.neg().contains(-2.0, 1.0));
    }

    #[test]
    fn params_validation() {
        let p = DispersionParams::new(1.0).unwrap();
        assert!(IllposedParams::new(1.0, 0.05, 0.05, 0.0, p).is_err());
        assert!(IllposedParams::new(64.0, 0.0, 0.05, 0.0, p).is_err());
        assert!(IllposedParams::new(64.0, 0.05, 0.0, 0.0, p).is_err());
        let q = ip(64.0, 1.0);
        assert!((q.gamma() - 64f64.powf(-1.05)).abs() < 1e-18);
        assert!((q.predicted_exponent() - 0.8975).abs() < 1e-12);
        assert!((ip(64.0, 1.5).predicted_exponent() - 0.3725).abs() < 1e-12);
    }

    #[test]
    fn l2_norm_matches_box_areas() {
        for &n in &[16.0, 128.0, 1024.0] {
            let q = ip(n, 1.0);
            let g = q.gamma();
            let ge = g.powf(q.epsilon);
            let want = 2.0 * g.powf(-(1.0 + q.epsilon))
                * (g / 2.0 * ge + n.powf(-2.0 * q.s) * g * ge / 2.0);
            let got = illposed_spectrum(&q).es_norm_sq(0.0, &q.p, 1, 4);
            assert!((got - want).abs() <= 1e-10 * want, "{got} {want}");
        }
    }

    #[test]
    fn es_norm_bounded_in_n() {
        let v: Vec<f64> = (4..=10)
            .map(|k| illposed_spectrum(&ip(2f64.powi(k), 1.0)).es_norm_sq(0.5, &ip(2.0, 1.0).p, 2, 8).sqrt())
            .collect();
        let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
        assert!(hi / lo <= 4.0, "{v:?}");
    }

    #[test]
    fn lattice_data_is_real() {
        let q = ip(2.0, 1.0);
        let g = q.gamma();
        let lx = 2.0 * std::f64::consts::PI / (g / 8.0);
        let nx = ((2.0 * (q.n + g) / (g / 8.0)).ceil() as usize + 2).next_power_of_two();
        let grid = Grid2D::new(nx, 64, lx, 2.0 * std::f64::consts::PI / (g.powf(q.epsilon) / 8.0)).unwrap();
        let f = illposed_data(&q, grid).unwrap();
        let u = inverse_transform_complex(&f).unwrap();
        let max_im = u.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let max_re = u.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        assert!(max_im < 1e-12 * max_re);
        let coarse = Grid2D::new(64, 64, 10.0, 10.0).unwrap();
        assert!(matches!(illposed_data(&q, coarse), Err(BozkError::Unresolvable(_))));
    }

    #[test]
    fn kernel_limits() {
        assert_eq!(duhamel_kernel(1e-13, 0.5), Complex64::new(0.0, 0.5));
        let k = duhamel_kernel(2.0, 0.3);
        let want = (Complex64::new(0.0, 0.6).exp() - 1.0) / 2.0;
        assert!((k - want).norm() < 1e-15);
        // |t| gamma N^alpha <= 0.1 keeps |K| within [0.95 |t|, |t|].
        for i in 0..=100 {
            let om = -1.0 + 0.02 * i as f64;
            let t = 0.1;
            let m = duhamel_kernel(om, t).norm();
            assert!(m <= t * (1.0 + 1e-15) && m >= 0.95 * t);
        }
    }

    #[test]
    fn small_time_norm_is_linear() {
        let q = ip(64.0, 1.0);
        let quad = PicardQuadrature::default();
        let a = picard_second_iterate(&q, 1e-6, true, &quad).unwrap();
        let b = picard_second_iterate(&q, 1e-5, true, &quad).unwrap();
        assert!(!a.flagged && !b.flagged);
        assert!(((b.es_norm / a.es_norm).log10() - 1.0).abs() < 1e-3);
        assert!(picard_second_iterate(&q, 0.0, true, &quad).is_err());
    }

    #[test]
    fn linear_limit_matches_closed_form() {
        // K -> i t: F(I_N) = t xi c1 c2 area(Q1 cap (z - Q2)); compare with
        // an independent composite-midpoint evaluation of that expression.
        let q = ip(32.0, 1.0);
        let t = 1e-9;
        let r = picard_second_iterate(&q, t, true, &PicardQuadrature::default()).unwrap();
        let (q1, q2) = q.boxes();
        let (a1, a2) = q.amplitudes();
        let (x0, x1) = (q1.xi_lo + q2.xi_lo, q1.xi_hi + q2.xi_hi);
        let (m0, m1) = (q1.mu_lo + q2.mu_lo, q1.mu_hi + q2.mu_hi);
        let n = 600;
        let (hx, hm) = ((x1 - x0) / n as f64, (m1 - m0) / n as f64);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let z = (x0 + (i as f64 + 0.5) * hx, m0 + (j as f64 + 0.5) * hm);
                let area = q1.fiber(&q2, z).map_or(0.0, |b| b.area());
                acc += es_weight(z.0, z.1, q.s, &q.p) * (z.0 * t * a1 * a2 * area).powi(2);
            }
        }
        let want = (acc * hx * hm).sqrt();
        assert!((r.es_norm - want).abs() < 1e-4 * want, "{} {}", r.es_norm, want);
    }

    #[test]
    fn full_interaction_contains_lowhigh() {
        let q = ip(16.0, 1.0);
        let quad = PicardQuadrature::default();
        let lh = picard_second_iterate(&q, 1e-4, true, &quad).unwrap();
        let all = picard_second_iterate(&q, 1e-4, false, &quad).unwrap();
        assert!(all.es_norm > lh.es_norm);
        assert_eq!(all.omega_band, lh.omega_band);
    }

    proptest! {
        #[test]
        fn stable_resonance_agrees(x1 in -5.0f64..5.0, m1 in -3.0f64..3.0, x2 in -5.0f64..5.0, m2 in -3.0f64..3.0, a in 1.0f64..=2.0) {
            let p = DispersionParams::new(a).unwrap();
            let s = resonance_stable((x1, m1), (x2, m2), &p);
            let d = eval_resonance((x1, m1), (x2, m2), &p);
            prop_assert!((s - d).abs() <= 1e-11 * (1.0 + d.abs()));
        }
    }
}
