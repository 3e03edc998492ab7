//! Direct evaluation of `int (f1 * f2) f3` for nonnegative functions on the
//! sets `D_{H,N,L} = {(tau, zeta): xi in I_N, zeta in Delta_H, |tau + omega(zeta)| <= L}`.
//!
//! Each function is `f_i(tau, zeta) = a_i(zeta) 1{|tau + omega(zeta)| <= L_i}`
//! with `a_i >= 0` on a `(xi, mu)` lattice. With `theta = tau + omega` the
//! `tau` integrals collapse to the exact kernel
//!
//! ```text
//! K(s) = int int 1{|t1| <= L1} 1{|t2| <= L2} 1{|t1 + t2 - s| <= L3} dt1 dt2,
//! ```
//!
//! evaluated at `s = Omega(zeta1, zeta2)`, so that
//! `int (f1 * f2) f3 = sum a1(z1) a2(z2) a3(z1 + z2) K(Omega(z1, z2)) (dxi dmu)^2`
//! and `||f_i||^2 = 2 L_i sum a_i^2 dxi dmu`.

use rand::Rng;

use super::sweep::{FitTarget, SweepPoint, SweepResult};
use crate::error::{BozkError, Result};
use crate::lp_toolkit::DyadicIndex;
use crate::rng::substream;
use crate::spectral_core::{eval_h, eval_resonance, DispersionParams};

/// Largest support (lattice points) of a single function.
pub const MAX_SUPPORT: usize = 48 * 48 * 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrilinearCase {
    /// All shells arbitrary: `H_min^{1/(2 alpha) + 1/4} L_min^{1/2}`.
    C1,
    /// `H_min << H_max` and the `H_min` function carries `L_max`:
    /// `H_max^{-1/2} H_min^{1/4} L_min^{1/2} L_max^{1/2}`.
    C2a,
    /// `H_min << H_max` otherwise: `H_max^{-1/2} H_min^{1/4} L_min^{1/2} L_med^{1/2}`.
    C2b,
    /// `H_min ~ H_max` with `x`-localization:
    /// `N_max^{-alpha/2} H_min^{1/4} L_med^{1/2} L_max^{1/2}`.
    C3,
}

impl TrilinearCase {
    pub fn name(&self) -> &'static str {
        match self {
            Self::C1 => "c1",
            Self::C2a => "c2a",
            Self::C2b => "c2b",
            Self::C3 => "c3",
        }
    }
}

impl std::str::FromStr for TrilinearCase {
    type Err = BozkError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c1" => Ok(Self::C1),
            "c2a" => Ok(Self::C2a),
            "c2b" => Ok(Self::C2b),
            "c3" => Ok(Self::C3),
            _ => Err(BozkError::InvalidParameter(format!(
                "unknown trilinear case '{s}' (expected c1, c2a, c2b, c3)"
            ))),
        }
    }
}

/// Factor by which `H_max` must exceed `H_min` in case 2.
pub const SEPARATION: u64 = 8;
/// Largest `H_max / H_min` accepted as `H_min ~ H_max` in case 3.
pub const COMPARABLE: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrilinearConfig {
    pub case: TrilinearCase,
    pub h: [DyadicIndex; 3],
    pub n: Option<[DyadicIndex; 3]>,
    pub l: [DyadicIndex; 3],
}

/// Uniform `(xi, mu)` lattice spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrilinearLattice {
    pub dxi: f64,
    pub dmu: f64,
}

/// A nonnegative function `a(zeta) 1{|theta| <= l}` on lattice points `(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction {
    pub points: Vec<(i64, i64)>,
    pub values: Vec<f64>,
    pub l: f64,
}

impl LatticeFunction {
    pub fn norm(&self, lat: &TrilinearLattice) -> f64 {
        (2.0 * self.l * self.values.iter().map(|v| v * v).sum::<f64>() * lat.dxi * lat.dmu).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrilinearPoint {
    pub config: TrilinearConfig,
    /// `int (f1 * f2) f3 / prod ||f_i||` per trial.
    pub normalized: Vec<f64>,
    pub bound: f64,
    /// Largest `normalized / bound` over the trials.
    pub max_ratio: f64,
    pub support_sizes: [usize; 3],
}

fn sorted3(v: [f64; 3]) -> [f64; 3] {
    let mut s = v;
    s.sort_by(f64::total_cmp);
    s
}

/// Checks the side conditions of the case; the error names the violated one.
pub fn check_hypothesis(cfg: &TrilinearConfig) -> Result<()> {
    let hv: Vec<u64> = cfg.h.iter().map(|h| h.value()).collect();
    let (hmin, hmax) = (*hv.iter().min().unwrap(), *hv.iter().max().unwrap());
    if hmin < 2 {
        return Err(BozkError::Hypothesis("shell indices must satisfy H >= 2".into()));
    }
    match cfg.case {
        TrilinearCase::C1 => {}
        TrilinearCase::C2a | TrilinearCase::C2b => {
            if hmax < SEPARATION * hmin {
                return Err(BozkError::Hypothesis(format!(
                    "case 2 needs H_min << H_max (H_max >= {SEPARATION} H_min), got H_min = {hmin}, H_max = {hmax}"
                )));
            }
            let lmax = cfg.l.iter().map(|l| l.value()).max().unwrap();
            let carries = (0..3).any(|i| hv[i] == hmin && cfg.l[i].value() == lmax);
            if cfg.case == TrilinearCase::C2a && !carries {
                return Err(BozkError::Hypothesis(
                    "case c2a needs (H_i, L_i) = (H_min, L_max) for some i".into(),
                ));
            }
            if cfg.case == TrilinearCase::C2b && carries {
                return Err(BozkError::Hypothesis(
                    "case c2b needs (H_i, L_i) != (H_min, L_max) for every i".into(),
                ));
            }
        }
        TrilinearCase::C3 => {
            if hmax > COMPARABLE * hmin {
                return Err(BozkError::Hypothesis(format!(
                    "case 3 needs H_min ~ H_max (H_max <= {COMPARABLE} H_min), got H_min = {hmin}, H_max = {hmax}"
                )));
            }
            match cfg.n {
                None => return Err(BozkError::Hypothesis("case 3 needs N indices".into())),
                Some(n) if n.iter().any(|v| v.value() < 2) => {
                    return Err(BozkError::Hypothesis("N indices must satisfy N >= 2".into()))
                }
                _ => {}
            }
        }
    }
    Ok(())
}

/// Claimed bound with implicit constant 1 (the `+` in `H^{1/4+}` dropped).
pub fn claimed_bound(cfg: &TrilinearConfig, p: &DispersionParams) -> f64 {
    let a = p.alpha();
    let h = sorted3(cfg.h.map(|v| v.as_f64()));
    let l = sorted3(cfg.l.map(|v| v.as_f64()));
    match cfg.case {
        TrilinearCase::C1 => h[0].powf(1.0 / (2.0 * a) + 0.25) * l[0].sqrt(),
        TrilinearCase::C2a => h[2].powf(-0.5) * h[0].powf(0.25) * (l[0] * l[2]).sqrt(),
        TrilinearCase::C2b => h[2].powf(-0.5) * h[0].powf(0.25) * (l[0] * l[1]).sqrt(),
        TrilinearCase::C3 => {
            let nmax = cfg.n.map_or(1.0, |n| sorted3(n.map(|v| v.as_f64()))[2]);
            nmax.powf(-a / 2.0) * h[0].powf(0.25) * (l[1] * l[2]).sqrt()
        }
    }
}

/// Lattice points of `Delta_H` (intersected with `I_N` when given):
/// `H/2 <= h <= 2H` and `N/2 <= |xi| <= 2N`.
pub fn support_points(
    h: DyadicIndex,
    n: Option<DyadicIndex>,
    lat: &TrilinearLattice,
    p: &DispersionParams,
) -> Result<Vec<(i64, i64)>> {
    let hv = h.as_f64();
    let a = p.alpha();
    let xi_max = (2.0 * hv / (a + 1.0)).powf(1.0 / a);
    let mu_max = (2.0 * hv).sqrt();
    let (jm, km) = ((xi_max / lat.dxi).ceil() as i64, (mu_max / lat.dmu).ceil() as i64);
    let mut out = Vec::new();
    for j in -jm..=jm {
        let xi = j as f64 * lat.dxi;
        if let Some(nv) = n {
            let nf = nv.as_f64();
            if xi.abs() < nf / 2.0 || xi.abs() > 2.0 * nf {
                continue;
            }
        }
        for k in -km..=km {
            let hz = eval_h(xi, k as f64 * lat.dmu, p);
            if hz >= hv / 2.0 && hz <= 2.0 * hv {
                out.push((j, k));
            }
        }
    }
    if out.is_empty() {
        return Err(BozkError::Hypothesis(format!(
            "support for H = {} is empty on the lattice",
            h.value()
        )));
    }
    if out.len() > MAX_SUPPORT {
        return Err(BozkError::InvalidParameter(format!(
            "support for H = {} has {} lattice points, more than {MAX_SUPPORT}",
            h.value(),
            out.len()
        )));
    }
    Ok(out)
}

/// Exact `K(s)` for box profiles of half-widths `l1, l2, l3`.
pub fn theta_kernel(s: f64, l1: f64, l2: f64, l3: f64) -> f64 {
    let m = l1.min(l2);
    let a = (l1 - l2).abs();
    let b = l1 + l2;
    // Antiderivative of the trapezoid 1_{l1} * 1_{l2}, odd in u.
    let prim = |u: f64| {
        let v = u.abs();
        let val = if v <= a {
            2.0 * m * v
        } else if v <= b {
            2.0 * m * a + b * (v - a) - 0.5 * (v * v - a * a)
        } else {
            2.0 * m * a + 0.5 * (b - a) * (b - a)
        };
        val * u.signum()
    };
    prim(s + l3) - prim(s - l3)
}

/// Values of a lattice function on the bounding box of its support.
struct DenseLookup {
    j0: i64,
    k0: i64,
    nj: i64,
    nk: i64,
    vals: Vec<f64>,
}

impl DenseLookup {
    fn new(f: &LatticeFunction) -> Self {
        let j0 = f.points.iter().map(|p| p.0).min().unwrap_or(0);
        let k0 = f.points.iter().map(|p| p.1).min().unwrap_or(0);
        let nj = f.points.iter().map(|p| p.0).max().map_or(0, |m| m - j0 + 1);
        let nk = f.points.iter().map(|p| p.1).max().map_or(0, |m| m - k0 + 1);
        let mut vals = vec![f64::NAN; (nj * nk) as usize];
        for (&(j, k), &v) in f.points.iter().zip(&f.values) {
            vals[((j - j0) * nk + (k - k0)) as usize] = v;
        }
        Self { j0, k0, nj, nk, vals }
    }

    #[inline]
    fn get(&self, j: i64, k: i64) -> Option<f64> {
        let (a, b) = (j - self.j0, k - self.k0);
        if a < 0 || b < 0 || a >= self.nj || b >= self.nk {
            return None;
        }
        let v = self.vals[(a * self.nk + b) as usize];
        (!v.is_nan()).then_some(v)
    }
}

/// `int (f1 * f2) f3` by direct summation over lattice pairs.
pub fn trilinear_form(
    f: [&LatticeFunction; 3],
    lat: &TrilinearLattice,
    p: &DispersionParams,
) -> f64 {
    let index = DenseLookup::new(f[2]);
    let (l1, l2, l3) = (f[0].l, f[1].l, f[2].l);
    let mut acc = 0.0;
    for (&(j1, k1), &v1) in f[0].points.iter().zip(&f[0].values) {
        if v1 == 0.0 {
            continue;
        }
        let z1 = (j1 as f64 * lat.dxi, k1 as f64 * lat.dmu);
        let mut row = 0.0;
        for (&(j2, k2), &v2) in f[1].points.iter().zip(&f[1].values) {
            if let Some(v3) = index.get(j1 + j2, k1 + k2) {
                let z2 = (j2 as f64 * lat.dxi, k2 as f64 * lat.dmu);
                let k = theta_kernel(eval_resonance(z1, z2, p), l1, l2, l3);
                row += v2 * v3 * k;
            }
        }
        acc += v1 * row;
    }
    acc * (lat.dxi * lat.dmu).powi(2)
}

/// Random uniform amplitudes on the supports of `cfg`, `trials` times;
/// reports the largest ratio to the claimed bound.
pub fn trilinear_bound_check(
    cfg: &TrilinearConfig,
    p: &DispersionParams,
    lat: &TrilinearLattice,
    trials: usize,
    seed: u64,
) -> Result<TrilinearPoint> {
    check_hypothesis(cfg)?;
    if trials == 0 {
        return Err(BozkError::InvalidParameter("trials must be >= 1".into()));
    }
    if !(lat.dxi > 0.0 && lat.dmu > 0.0) {
        return Err(BozkError::InvalidParameter("lattice spacings must be > 0".into()));
    }
    let supports = (0..3)
        .map(|i| support_points(cfg.h[i], cfg.n.map(|n| n[i]), lat, p))
        .collect::<Result<Vec<_>>>()?;
    let bound = claimed_bound(cfg, p);
    let mut normalized = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = substream(seed, trial as u64);
        let fs: Vec<LatticeFunction> = (0..3)
            .map(|i| LatticeFunction {
                points: supports[i].clone(),
                values: supports[i].iter().map(|_| rng.random::<f64>()).collect(),
                l: cfg.l[i].as_f64(),
            })
            .collect();
        let val = trilinear_form([&fs[0], &fs[1], &fs[2]], lat, p);
        let norms: f64 = fs.iter().map(|f| f.norm(lat)).product();
        normalized.push(val / norms);
    }
    let max_ratio = normalized.iter().fold(0.0f64, |m, v| m.max(*v)) / bound;
    Ok(TrilinearPoint {
        config: *cfg,
        normalized,
        bound,
        max_ratio,
        support_sizes: [supports[0].len(), supports[1].len(), supports[2].len()],
    })
}

/// The swept quantity of a trilinear sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrilinearAxis {
    HMin,
    HMax,
    NMax,
}

fn axis_value(cfg: &TrilinearConfig, axis: TrilinearAxis) -> f64 {
    let h = sorted3(cfg.h.map(|v| v.as_f64()));
    match axis {
        TrilinearAxis::HMin => h[0],
        TrilinearAxis::HMax => h[2],
        TrilinearAxis::NMax => cfg.n.map_or(f64::NAN, |n| sorted3(n.map(|v| v.as_f64()))[2]),
    }
}

/// Runs `trilinear_bound_check` on each config (same seed) and fits the
/// log-log slope of the max ratio against the chosen axis.
pub fn trilinear_sweep(
    configs: &[TrilinearConfig],
    axis: TrilinearAxis,
    p: &DispersionParams,
    lat: &TrilinearLattice,
    trials: usize,
    seed: u64,
) -> Result<SweepResult> {
    let case = configs.first().ok_or(BozkError::Empty("trilinear sweep configs"))?.case;
    let mut points = Vec::with_capacity(configs.len());
    for cfg in configs {
        let r = trilinear_bound_check(cfg, p, lat, trials, seed)?;
        let best = r.max_ratio * r.bound;
        let mean = r.normalized.iter().sum::<f64>() / r.normalized.len() as f64;
        let mut params: Vec<(String, f64)> = vec![("alpha".into(), p.alpha())];
        for i in 0..3 {
            params.push((format!("H{}", i + 1), cfg.h[i].as_f64()));
        }
        if let Some(n) = cfg.n {
            for (i, v) in n.iter().enumerate() {
                params.push((format!("N{}", i + 1), v.as_f64()));
            }
        }
        for i in 0..3 {
            params.push((format!("L{}", i + 1), cfg.l[i].as_f64()));
        }
        params.push(("dxi".into(), lat.dxi));
        params.push(("dmu".into(), lat.dmu));
        params.push(("trials".into(), trials as f64));
        params.push(("mean_ratio".into(), mean / r.bound));
        for (i, s) in r.support_sizes.iter().enumerate() {
            params.push((format!("support{}", i + 1), *s as f64));
        }
        points.push(SweepPoint::new(axis_value(cfg, axis), params, best, r.bound));
    }
    let x_name = match axis {
        TrilinearAxis::HMin => "H_min",
        TrilinearAxis::HMax => "H_max",
        TrilinearAxis::NMax => "N_max",
    };
    SweepResult::build(
        &format!("trilinear-{}", case.name()),
        x_name,
        points,
        FitTarget::Ratio,
        false,
        vec![],
    )
}
