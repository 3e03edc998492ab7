//! Sup norms of the frequency-localized dispersive kernel
//!
//! ```text
//! I_t(x, y) = int e^{i (t omega + x xi + y mu)} varphi_N(xi) rho_delta(B - mu^2 / |xi|^alpha) dxi dmu.
//! ```
//!
//! The substitution `xi = N xi'`, `mu = N^{alpha/2} mu'` gives
//! `I_t(x, y) = N^{1 + alpha/2} J_T(N x, N^{alpha/2} y)` with `T = t N^{alpha+1}`
//! and `J` the same integral at `N = 1` (with `varphi` in place of
//! `varphi_N`). All evaluations run on `J`. The `mu` integral is truncated by
//! the smooth factor `chi(mu' / M0)`, whose plateau ends 20% beyond the
//! outer edge of the band at `|xi'| = 5/3`.
//!
//! The integrand is even under `(xi, mu) -> (-xi, -mu)` with `omega` odd, so
//! `J = 2 Re J_+` where `J_+` integrates over `xi > 0`. `J_+` is a lattice
//! Riemann sum evaluated on the whole physical plane by FFT; the lattice
//! period covers the stationary region `-T grad omega(supp)` plus a margin.
//! Coarse maxima of the envelope `2 |J_+|` are refined by direct summation,
//! and the final value is re-evaluated on a lattice of half the spacing.

use ndarray::Array2;
use num_complex::Complex64;

use super::sweep::{FitTarget, SweepPoint, SweepResult};
use crate::error::{BozkError, Result};
use crate::lp_toolkit::{chi, rho_delta, varphi, DyadicIndex};
use crate::spectral_core::DispersionParams;

/// Resolution controls for kernel evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuadrature {
    /// Margin added on each side of the stationary region, rescaled units.
    pub margin: f64,
    /// Number of coarse envelope maxima refined by direct summation.
    pub candidates: usize,
    /// Largest relative change of the maximum tolerated when the lattice
    /// spacing is halved.
    pub doubling_tol: f64,
}

impl Default for KernelQuadrature {
    fn default() -> Self {
        Self {
            margin: 200.0,
            candidates: 4,
            doubling_tol: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelEvaluation {
    pub n: u64,
    pub t: f64,
    /// `T = t N^{alpha+1}`.
    pub scaled_time: f64,
    /// `||I_t||_inf`.
    pub sup: f64,
    /// `||J_T||_inf`.
    pub scaled_sup: f64,
    /// Discrete `int |multiplier|` bounding `||I_t||_inf`.
    pub area_bound: f64,
    /// Location of the maximum in physical `(x, y)`.
    pub argmax: (f64, f64),
    /// `(xi, mu)` lattice size of the `xi > 0` half.
    pub lattice: (usize, usize),
    /// Relative change of `|I_t|` at the maximum under lattice doubling.
    pub doubling_change: f64,
    pub converged: bool,
}

struct Profile {
    alpha: f64,
    b: f64,
    delta: f64,
    m0: f64,
    mu_max: f64,
}

const XI_LO: f64 = 2.0 / 3.0;
const XI_HI: f64 = 5.0 / 3.0;

impl Profile {
    fn new(p: &DispersionParams, delta: f64) -> Self {
        let (alpha, b) = (p.alpha(), p.b());
        let band_top = (b + delta).sqrt() * XI_HI.powf(alpha / 2.0);
        // chi(mu / M0) = 1 for |mu| <= 4 M0 / 3 = 1.2 band_top.
        let m0 = 0.9 * band_top;
        Self {
            alpha,
            b,
            delta,
            m0,
            mu_max: 5.0 * m0 / 3.0,
        }
    }

    fn multiplier(&self, xi: f64, mu: f64) -> f64 {
        let v = varphi(xi);
        if v == 0.0 {
            return 0.0;
        }
        let c = chi(mu / self.m0);
        if c == 0.0 {
            return 0.0;
        }
        v * c * rho_delta(self.b - mu * mu / xi.powf(self.alpha), self.delta)
    }

    fn omega(&self, xi: f64, mu: f64) -> f64 {
        xi * (xi.powf(self.alpha) + mu * mu)
    }

    /// Range of `x`-group velocity `(alpha+1) xi^alpha + mu^2` over the support.
    fn h_range(&self) -> (f64, f64) {
        let a = self.alpha;
        (
            (a + 1.0) * XI_LO.powf(a),
            (a + 1.0) * XI_HI.powf(a) + self.mu_max * self.mu_max,
        )
    }
}

/// Amplitudes `e^{i T omega} m dxi dmu` of `J_+` on a rectangular lattice.
struct Lattice {
    xi0: f64,
    dxi: f64,
    nxi: usize,
    mu0: f64,
    dmu: f64,
    nmu: usize,
    x_lo: f64,
    period_x: f64,
    period_y: f64,
    amp: Vec<Complex64>,
    mass: f64,
}

impl Lattice {
    /// Lattice whose physical periods are `refine` times the extent of the
    /// stationary region plus margins. When `store` is false only the
    /// geometry is set up.
    fn new(prof: &Profile, t: f64, margin: f64, refine: f64, store: bool) -> Self {
        let (h_lo, h_hi) = prof.h_range();
        let ext_x = t * (h_hi - h_lo) + 2.0 * margin;
        let ext_y = 4.0 * t * XI_HI * prof.mu_max + 2.0 * margin;
        let period_x = refine * ext_x;
        let period_y = refine * ext_y;
        let dxi = 2.0 * std::f64::consts::PI / period_x;
        let dmu = 2.0 * std::f64::consts::PI / period_y;
        let nxi = ((XI_HI - XI_LO) / dxi).ceil() as usize + 1;
        let nmu = (2.0 * prof.mu_max / dmu).ceil() as usize + 1;
        let mut lat = Self {
            xi0: XI_LO,
            dxi,
            nxi,
            mu0: -prof.mu_max,
            dmu,
            nmu,
            x_lo: -t * h_hi - margin - 0.5 * (period_x - ext_x),
            period_x,
            period_y,
            amp: Vec::new(),
            mass: 0.0,
        };
        if store {
            lat.store(prof, t);
        }
        lat
    }

    /// Calls `f(j, k, e^{i t omega} m dxi dmu)` for every nonzero amplitude and
    /// returns the discrete mass `2 sum m dxi dmu`.
    fn visit(&self, prof: &Profile, t: f64, mut f: impl FnMut(usize, usize, Complex64)) -> f64 {
        let w = self.dxi * self.dmu;
        let mut mass = 0.0;
        for j in 0..self.nxi {
            let xi = self.xi_at(j);
            for k in 0..self.nmu {
                let mu = self.mu_at(k);
                let m = prof.multiplier(xi, mu);
                if m != 0.0 {
                    mass += m;
                    f(j, k, Complex64::from_polar(m * w, t * prof.omega(xi, mu)));
                }
            }
        }
        2.0 * mass * w
    }

    fn store(&mut self, prof: &Profile, t: f64) {
        let nmu = self.nmu;
        let mut amp = vec![Complex64::new(0.0, 0.0); self.nxi * nmu];
        self.mass = self.visit(prof, t, |j, k, a| amp[j * nmu + k] = a);
        self.amp = amp;
    }

    fn xi_at(&self, j: usize) -> f64 {
        self.xi0 + j as f64 * self.dxi
    }

    fn mu_at(&self, k: usize) -> f64 {
        self.mu0 + k as f64 * self.dmu
    }

    /// Representative of `x` in the window that holds the kernel.
    fn unwrap_x(&self, x: f64) -> f64 {
        self.x_lo + (x - self.x_lo).rem_euclid(self.period_x)
    }

    fn unwrap_y(&self, y: f64) -> f64 {
        let h = 0.5 * self.period_y;
        -h + (y + h).rem_euclid(self.period_y)
    }

    /// `2 Re J_+` on the tensor set `xs x ys` by direct summation.
    fn eval_tensor(&self, xs: &[f64], ys: &[f64]) -> Array2<f64> {
        let ey: Vec<Vec<Complex64>> = ys.iter().map(|&y| phase_ramp(y, self.mu0, self.dmu, self.nmu)).collect();
        let ex: Vec<Vec<Complex64>> = xs.iter().map(|&x| phase_ramp(x, self.xi0, self.dxi, self.nxi)).collect();
        let mut c = vec![Complex64::new(0.0, 0.0); self.nxi * ys.len()];
        for j in 0..self.nxi {
            let row = &self.amp[j * self.nmu..(j + 1) * self.nmu];
            for (b, e) in ey.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, z) in row.iter().zip(e) {
                    acc += a * z;
                }
                c[j * ys.len() + b] = acc;
            }
        }
        Array2::from_shape_fn((xs.len(), ys.len()), |(a, b)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.nxi {
                acc += ex[a][j] * c[j * ys.len() + b];
            }
            2.0 * acc.re
        })
    }
}

/// `e^{i s (v0 + k dv)}` for `k < n`, re-anchored every 64 steps.
fn phase_ramp(s: f64, v0: f64, dv: f64, n: usize) -> Vec<Complex64> {
    let step = Complex64::from_polar(1.0, s * dv);
    let mut out = Vec::with_capacity(n);
    let mut z = Complex64::from_polar(1.0, s * v0);
    for k in 0..n {
        if k % 64 == 0 {
            z = Complex64::from_polar(1.0, s * (v0 + k as f64 * dv));
        }
        out.push(z);
        z *= step;
    }
    out
}

/// `2 Re J_+(x, y)` on a lattice built on the fly, without storing it.
fn eval_point_streaming(prof: &Profile, lat: &Lattice, t: f64, x: f64, y: f64) -> f64 {
    let w = lat.dxi * lat.dmu;
    let ey = phase_ramp(y, lat.mu0, lat.dmu, lat.nmu);
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..lat.nxi {
        let xi = lat.xi_at(j);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, e) in ey.iter().enumerate() {
            let mu = lat.mu_at(k);
            let m = prof.multiplier(xi, mu);
            if m != 0.0 {
                acc += Complex64::from_polar(m * w, t * prof.omega(xi, mu)) * e;
            }
        }
        total += acc * Complex64::from_polar(1.0, x * xi);
    }
    2.0 * total.re
}

fn fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for f in [2, 3, 5] {
            while r % f == 0 {
                r /= f;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

fn linspace(c: f64, half: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| c - half + 2.0 * half * i as f64 / (n - 1) as f64)
        .collect()
}

/// `||J_T||_inf` with its location, plus the lattice used.
fn scaled_sup(prof: &Profile, t: f64, q: &KernelQuadrature) -> (f64, (f64, f64), Lattice) {
    // The FFT buffer is filled straight from the profile; the amplitude
    // array for the refinement is built after the buffer is released, so
    // only one full-size array is alive at a time.
    let mut lat = Lattice::new(prof, t, q.margin, 1.0, false);
    let (nx, ny) = (fast_len(lat.nxi), fast_len(lat.nmu));
    let mut buf = Array2::<Complex64>::zeros((nx, ny));
    lat.visit(prof, t, |j, k, a| buf[[j, k]] = a);
    crate::spectral_core::fft2_raw(&mut buf, true);
    let sx = lat.period_x / nx as f64;
    let sy = lat.period_y / ny as f64;
    let frame = Lattice { amp: Vec::new(), ..lat };
    let coord = |p: usize, qq: usize| (frame.unwrap_x(p as f64 * sx), frame.unwrap_y(qq as f64 * sy));

    // Coarse pass: true values and local maxima of the envelope.
    let mut best = (0.0f64, (0.0, 0.0));
    let mut peaks: Vec<(f64, usize, usize)> = Vec::new();
    for p in 0..nx {
        for qq in 0..ny {
            let f = buf[[p, qq]];
            let (x, y) = coord(p, qq);
            let v = 2.0 * (f * Complex64::from_polar(1.0, x * lat.xi0 + y * lat.mu0)).re;
            if v.abs() > best.0 {
                best = (v.abs(), (x, y));
            }
            let e = f.norm();
            let mut is_peak = true;
            'nb: for dp in [nx - 1, 0, 1] {
                for dq in [ny - 1, 0, 1] {
                    if (dp, dq) != (0, 0) && buf[[(p + dp) % nx, (qq + dq) % ny]].norm() > e {
                        is_peak = false;
                        break 'nb;
                    }
                }
            }
            if is_peak {
                peaks.push((e, p, qq));
            }
        }
    }
    drop(buf);
    lat.store(prof, t);
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0));
    peaks.truncate(q.candidates.max(1));

    for &(_, p, qq) in &peaks {
        let (mut xc, mut yc) = coord(p, qq);
        let (mut hx, mut hy, mut pts) = (1.5 * sx, 1.5 * sy, 13);
        for _ in 0..3 {
            let xs = linspace(xc, hx, pts);
            let ys = linspace(yc, hy, pts);
            let vals = lat.eval_tensor(&xs, &ys);
            let mut loc = (0.0f64, 0, 0);
            for ((a, b), v) in vals.indexed_iter() {
                if v.abs() > loc.0 {
                    loc = (v.abs(), a, b);
                }
            }
            xc = xs[loc.1];
            yc = ys[loc.2];
            if loc.0 > best.0 {
                best = (loc.0, (xc, yc));
            }
            hx = 2.0 * (2.0 * hx / (pts - 1) as f64);
            hy = 2.0 * (2.0 * hy / (pts - 1) as f64);
            pts = 9;
        }
    }
    (best.0, best.1, lat)
}

/// Evaluates `||I_t||_inf` for one `(N, t)`.
pub fn kernel_sup(
    n: DyadicIndex,
    t: f64,
    delta: f64,
    p: &DispersionParams,
    q: &KernelQuadrature,
) -> Result<KernelEvaluation> {
    if n.value() < 2 {
        return Err(BozkError::InvalidParameter("kernel sweeps need N >= 2".into()));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(BozkError::InvalidParameter(format!("t = {t} must be > 0")));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(BozkError::InvalidParameter(format!("delta = {delta} must be > 0")));
    }
    if !(q.margin > 0.0 && q.doubling_tol > 0.0) {
        return Err(BozkError::InvalidParameter("margin and doubling_tol must be > 0".into()));
    }
    let a = p.alpha();
    let nf = n.as_f64();
    let big_t = t * nf.powf(a + 1.0);
    let prof = Profile::new(p, delta);
    let (sup1, (x1, y1), lat) = scaled_sup(&prof, big_t, q);
    let area1 = lat.mass;
    if sup1 > area1 * (1.0 + 1e-9) {
        return Err(BozkError::Hypothesis(format!(
            "kernel maximum {sup1} exceeds the multiplier mass {area1}"
        )));
    }
    let lattice = (lat.nxi, lat.nmu);
    drop(lat);
    let fine = Lattice::new(&prof, big_t, q.margin, 2.0, false);
    let v_fine = eval_point_streaming(&prof, &fine, big_t, x1, y1).abs();
    let doubling_change = (v_fine - sup1).abs() / sup1;
    let scale = nf.powf(1.0 + a / 2.0);
    Ok(KernelEvaluation {
        n: n.value(),
        t,
        scaled_time: big_t,
        sup: scale * sup1,
        scaled_sup: sup1,
        area_bound: scale * area1,
        argmax: (x1 / nf, y1 / nf.powf(a / 2.0)),
        lattice,
        doubling_change,
        converged: doubling_change < q.doubling_tol,
    })
}

fn eval_params(e: &KernelEvaluation, delta: f64, alpha: f64) -> Vec<(String, f64)> {
    vec![
        ("alpha".into(), alpha),
        ("delta".into(), delta),
        ("N".into(), e.n as f64),
        ("t".into(), e.t),
        ("T".into(), e.scaled_time),
        ("area_bound".into(), e.area_bound),
        ("doubling_change".into(), e.doubling_change),
    ]
}

fn collect(
    experiment: &str,
    x_name: &str,
    evals: Vec<KernelEvaluation>,
    delta: f64,
    p: &DispersionParams,
    x_of: impl Fn(&KernelEvaluation) -> f64,
    bound_of: impl Fn(&KernelEvaluation) -> f64,
) -> Result<SweepResult> {
    let mut notes = Vec::new();
    let mut flagged = false;
    for e in &evals {
        if !e.converged {
            flagged = true;
            notes.push(format!(
                "N={} t={:e}: lattice doubling changed the maximum by {:.3e}",
                e.n, e.t, e.doubling_change
            ));
        }
    }
    let points = evals
        .iter()
        .map(|e| SweepPoint::new(x_of(e), eval_params(e, delta, p.alpha()), e.sup, bound_of(e)))
        .collect();
    SweepResult::build(experiment, x_name, points, FitTarget::Measured, flagged, notes)
}

/// `||I_t||_inf` against `N^{-alpha/2} t^{-1}` over `times`; the fit is the
/// `t`-decay slope.
pub fn kernel_decay_sweep(
    n: DyadicIndex,
    delta: f64,
    p: &DispersionParams,
    times: &[f64],
    q: &KernelQuadrature,
) -> Result<SweepResult> {
    let evals = times
        .iter()
        .map(|&t| kernel_sup(n, t, delta, p, q))
        .collect::<Result<Vec<_>>>()?;
    let a = p.alpha();
    collect("kernel-decay-t", "t", evals, delta, p, |e| e.t, |e| {
        (e.n as f64).powf(-a / 2.0) / e.t
    })
}

/// `||I_t||_inf` against `N^{-alpha/2} t^{-1}` at fixed `t` over `ns`; the
/// fit is the `N`-decay slope.
pub fn kernel_n_sweep(
    ns: &[DyadicIndex],
    t: f64,
    delta: f64,
    p: &DispersionParams,
    q: &KernelQuadrature,
) -> Result<SweepResult> {
    let evals = ns
        .iter()
        .map(|&n| kernel_sup(n, t, delta, p, q))
        .collect::<Result<Vec<_>>>()?;
    let a = p.alpha();
    collect("kernel-decay-n", "N", evals, delta, p, |e| e.n as f64, |e| {
        (e.n as f64).powf(-a / 2.0) / e.t
    })
}

/// Short-time regime `t < N^{-(alpha+1)}`: `||I_t||_inf` against
/// `N^{1/2} t^{-1/2}`. The per-point ratios are the observed constants.
pub fn kernel_short_time_sweep(
    n: DyadicIndex,
    delta: f64,
    p: &DispersionParams,
    times: &[f64],
    q: &KernelQuadrature,
) -> Result<SweepResult> {
    let a = p.alpha();
    let limit = n.as_f64().powf(-(a + 1.0));
    if let Some(t) = times.iter().find(|&&t| t >= limit) {
        return Err(BozkError::InvalidParameter(format!(
            "t = {t} is outside the short-time regime t < N^-(alpha+1) = {limit}"
        )));
    }
    let evals = times
        .iter()
        .map(|&t| kernel_sup(n, t, delta, p, q))
        .collect::<Result<Vec<_>>>()?;
    collect("kernel-short-time", "t", evals, delta, p, |e| e.t, |e| {
        (e.n as f64).sqrt() / e.t.sqrt()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite_gauss;

    fn params(a: f64) -> DispersionParams {
        DispersionParams::new(a).unwrap()
    }

    #[test]
    fn fast_lengths() {
        assert_eq!(fast_len(7), 8);
        assert_eq!(fast_len(11), 12);
        assert_eq!(fast_len(31), 32);
        assert_eq!(fast_len(97), 100);
    }

    #[test]
    fn tiny_time_approaches_multiplier_mass() {
        // As T -> 0 the maximum sits at the origin and equals int m.
        let p = params(1.0);
        let prof = Profile::new(&p, 0.95);
        let q = KernelQuadrature::default();
        let (sup, _, lat) = scaled_sup(&prof, 1e-6, &q);
        assert!((sup - lat.mass).abs() < 1e-6 * lat.mass);
        // Mass against an independent tensor Gauss rule over the support; the
        // lattice rule converges only root-exponentially for these cutoffs.
        let mass = 2.0
            * composite_gauss(
                |xi| {
                    composite_gauss(|mu| prof.multiplier(xi, mu), -prof.mu_max, prof.mu_max, 256, 16)
                },
                XI_LO,
                XI_HI,
                128,
                16,
            );
        assert!((lat.mass - mass).abs() < 1e-5 * mass, "{} {}", lat.mass, mass);
    }

    #[test]
    fn fft_values_match_direct_sums() {
        let p = params(1.5);
        let prof = Profile::new(&p, 1.0);
        let lat = Lattice::new(&prof, 3.0, 40.0, 1.0, true);
        let xs = [-20.0, -7.5];
        let ys = [0.0, 3.3];
        let direct = lat.eval_tensor(&xs, &ys);
        for (a, &x) in xs.iter().enumerate() {
            for (b, &y) in ys.iter().enumerate() {
                let s = eval_point_streaming(&prof, &lat, 3.0, x, y);
                assert!((s - direct[[a, b]]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn exact_dilation_across_n() {
        // Same T at two N gives sups in the ratio (16/8)^{1 + alpha/2} = 4.
        let p = params(2.0);
        let q = KernelQuadrature::default();
        let e8 = kernel_sup(DyadicIndex::new(8).unwrap(), 2.0 / 512.0, 2.85, &p, &q).unwrap();
        let e16 = kernel_sup(DyadicIndex::new(16).unwrap(), 2.0 / 4096.0, 2.85, &p, &q).unwrap();
        assert!((e16.sup / e8.sup - 4.0).abs() < 1e-9);
        assert!(e8.converged && e16.converged);
        assert!(e8.sup <= e8.area_bound);
    }

    #[test]
    fn decay_between_two_times() {
        let p = params(1.0);
        let q = KernelQuadrature::default();
        let n = DyadicIndex::new(4).unwrap();
        let r = kernel_decay_sweep(n, 0.95, &p, &[1.0, 4.0], &q).unwrap();
        assert!(!r.flagged, "{:?}", r.notes);
        assert!(r.fit.slope < -0.8 && r.fit.slope > -1.2, "{}", r.fit.slope);
    }

    #[test]
    fn rejects_bad_input() {
        let p = params(1.0);
        let q = KernelQuadrature::default();
        assert!(kernel_sup(DyadicIndex::new(1).unwrap(), 1.0, 0.5, &p, &q).is_err());
        assert!(kernel_sup(DyadicIndex::new(4).unwrap(), 0.0, 0.5, &p, &q).is_err());
        assert!(kernel_sup(DyadicIndex::new(4).unwrap(), 1.0, -0.5, &p, &q).is_err());
        let n = DyadicIndex::new(4).unwrap();
        assert!(kernel_short_time_sweep(n, 0.5, &p, &[1.0], &q).is_err());
    }
}
