use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::lp_toolkit::{varphi_deriv, DyadicIndex};
use crate::quadrature::composite_gauss;
use crate::spectral_core::{abs_pow, DispersionParams, Zeta};

/// Gauss order of the theta-quadrature.
pub const THETA_ORDER: usize = 32;
/// Number of panels of the theta-quadrature.
pub const THETA_PANELS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolTag {
    Identity,
    Eta1Of(Box<SymbolTag>),
    Eta2Of(Box<SymbolTag>),
    Eta3 { h: u64, alpha: f64 },
    EtaTilde { h: u64, alpha: f64 },
    EnergyEta1 { h: u64, alpha: f64 },
    EnergyEta2 { h: u64, alpha: f64 },
    Scaled { factor: f64, base: Box<SymbolTag> },
    Custom(String),
}

type SymbolFn = dyn Fn(Zeta, Zeta) -> Complex64 + Send + Sync;

/// A bounded symbol `eta(z1, z2)` with a recorded uniform bound.
///
/// `conj_symmetric` records `eta(-z1, -z2) = conj(eta(z1, z2))`, which makes
/// `Pi_eta` map real fields to real fields.
#[derive(Clone)]
pub struct BilinearSymbol {
    eval: Arc<SymbolFn>,
    pub bound: f64,
    pub tag: SymbolTag,
    pub conj_symmetric: bool,
}

impl fmt::Debug for BilinearSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BilinearSymbol")
            .field("tag", &self.tag)
            .field("bound", &self.bound)
            .field("conj_symmetric", &self.conj_symmetric)
            .finish()
    }
}

impl BilinearSymbol {
    pub fn custom(
        name: &str,
        bound: f64,
        conj_symmetric: bool,
        f: impl Fn(Zeta, Zeta) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(f),
            bound,
            tag: SymbolTag::Custom(name.to_string()),
            conj_symmetric,
        }
    }

    pub fn identity() -> Self {
        Self {
            eval: Arc::new(|_, _| Complex64::new(1.0, 0.0)),
            bound: 1.0,
            tag: SymbolTag::Identity,
            conj_symmetric: true,
        }
    }

    pub fn zero() -> Self {
        Self::custom("zero", 0.0, true, |_, _| Complex64::new(0.0, 0.0))
    }

    #[inline]
    pub fn eval(&self, z1: Zeta, z2: Zeta) -> Complex64 {
        (self.eval)(z1, z2)
    }

    /// `factor * eta`.
    pub fn scaled(&self, factor: f64) -> Self {
        let inner = self.eval.clone();
        Self {
            eval: Arc::new(move |a, b| inner(a, b) * factor),
            bound: self.bound * factor.abs(),
            tag: SymbolTag::Scaled {
                factor,
                base: Box::new(self.tag.clone()),
            },
            conj_symmetric: self.conj_symmetric,
        }
    }

    /// `eta_3 = -2 int_0^1 varphi'(X(theta) / H) dtheta`.
    pub fn eta3(h: DyadicIndex, p: DispersionParams) -> Self {
        Self {
            eval: Arc::new(move |a, b| Complex64::new(eta3_eval(a, b, h, &p), 0.0)),
            bound: 2.0 * varphi_deriv_sup(),
            tag: SymbolTag::Eta3 {
                h: h.value(),
                alpha: p.alpha(),
            },
            conj_symmetric: true,
        }
    }

    /// `eta~ = -i alpha H^{1/alpha - 1} int_0^1 |theta xi1 + xi2|^{alpha-1} sgn(.) dtheta`.
    ///
    /// The recorded bound holds on `Delta_{<<H} x Delta_{~H}`.
    pub fn eta_tilde(h: DyadicIndex, p: DispersionParams) -> Self {
        let a = p.alpha();
        Self {
            eval: Arc::new(move |z1, z2| Complex64::new(0.0, eta_tilde_eval(z1, z2, h, &p))),
            bound: a * (20.0f64 / 3.0).powf((a - 1.0) / a),
            tag: SymbolTag::EtaTilde {
                h: h.value(),
                alpha: a,
            },
            conj_symmetric: true,
        }
    }

    /// First theta-integral symbol of the energy expansion (purely imaginary).
    pub fn energy_eta1(h: DyadicIndex, p: DispersionParams) -> Self {
        let a = p.alpha();
        Self {
            eval: Arc::new(move |z1, z2| Complex64::new(0.0, energy_eta1_eval(z1, z2, h, &p))),
            bound: a * (20.0f64 / 3.0).powf((a - 1.0) / a) * varphi_deriv_sup(),
            tag: SymbolTag::EnergyEta1 { h: h.value(), alpha: a },
            conj_symmetric: true,
        }
    }

    /// `-2 int_0^1 theta varphi'(X(theta) / H) dtheta`.
    pub fn energy_eta2(h: DyadicIndex, p: DispersionParams) -> Self {
        Self {
            eval: Arc::new(move |z1, z2| Complex64::new(energy_eta2_eval(z1, z2, h, &p), 0.0)),
            bound: varphi_deriv_sup(),
            tag: SymbolTag::EnergyEta2 {
                h: h.value(),
                alpha: p.alpha(),
            },
            conj_symmetric: true,
        }
    }
}

/// The two adjoint symbols, each an involution:
///
/// * `eta1(a, b) = eta(-a - b, b)` with `int Pi_eta(f, g) h = int f Pi_eta1(h, g)`,
/// * `eta2(a, b) = eta(a, -a - b)` with `int Pi_eta(f, g) h = int Pi_eta2(f, h) g`,
///
/// for real `f, g, h`.
pub fn adjoint_symbols(eta: &BilinearSymbol) -> (BilinearSymbol, BilinearSymbol) {
    let e1 = eta.eval.clone();
    let e2 = eta.eval.clone();
    let s1 = BilinearSymbol {
        eval: Arc::new(move |a: Zeta, b: Zeta| e1((-a.0 - b.0, -a.1 - b.1), b)),
        bound: eta.bound,
        tag: SymbolTag::Eta1Of(Box::new(eta.tag.clone())),
        conj_symmetric: eta.conj_symmetric,
    };
    let s2 = BilinearSymbol {
        eval: Arc::new(move |a: Zeta, b: Zeta| e2(a, (-a.0 - b.0, -a.1 - b.1))),
        bound: eta.bound,
        tag: SymbolTag::Eta2Of(Box::new(eta.tag.clone())),
        conj_symmetric: eta.conj_symmetric,
    };
    (s1, s2)
}

/// `sup |varphi'|`, by dense sampling of the transition annuli.
pub fn varphi_deriv_sup() -> f64 {
    static SUP: OnceLock<f64> = OnceLock::new();
    *SUP.get_or_init(|| {
        let n = 200_000;
        (0..=n)
            .map(|i| varphi_deriv(0.6 + 1.1 * i as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    })
}

#[inline]
fn shell_arg(t: f64, z1: Zeta, z2: Zeta, h: f64, alpha: f64) -> (f64, f64) {
    let xi = t * z1.0 + z2.0;
    let mu = t * z1.1 + z2.1;
    (xi, (abs_pow(xi, alpha) + mu * mu) / h)
}

/// Quick exclusion: `varphi'` vanishes unless `X / H` meets `(2/3, 5/6) u (4/3, 5/3)`.
fn theta_range_trivial(z1: Zeta, z2: Zeta, h: f64, alpha: f64) -> bool {
    // X(theta) is bounded on [0,1] by the endpoint values and, for the
    // convex part, from below by 0; a cheap sufficient test uses the max.
    let (_, x0) = shell_arg(0.0, z1, z2, h, alpha);
    let (_, x1) = shell_arg(1.0, z1, z2, h, alpha);
    x0.max(x1) <= 2.0 / 3.0
}

pub fn eta3_eval(z1: Zeta, z2: Zeta, h: DyadicIndex, p: &DispersionParams) -> f64 {
    let (hf, a) = (h.as_f64(), p.alpha());
    if theta_range_trivial(z1, z2, hf, a) {
        return 0.0;
    }
    -2.0 * composite_gauss(
        |t| varphi_deriv(shell_arg(t, z1, z2, hf, a).1),
        0.0,
        1.0,
        THETA_PANELS,
        THETA_ORDER,
    )
}

pub fn energy_eta2_eval(z1: Zeta, z2: Zeta, h: DyadicIndex, p: &DispersionParams) -> f64 {
    let (hf, a) = (h.as_f64(), p.alpha());
    if theta_range_trivial(z1, z2, hf, a) {
        return 0.0;
    }
    -2.0 * composite_gauss(
        |t| t * varphi_deriv(shell_arg(t, z1, z2, hf, a).1),
        0.0,
        1.0,
        THETA_PANELS,
        THETA_ORDER,
    )
}

/// Imaginary part of the first energy symbol.
pub fn energy_eta1_eval(z1: Zeta, z2: Zeta, h: DyadicIndex, p: &DispersionParams) -> f64 {
    let (hf, a) = (h.as_f64(), p.alpha());
    if theta_range_trivial(z1, z2, hf, a) {
        return 0.0;
    }
    let pre = -a * hf.powf(1.0 / a - 1.0);
    pre * composite_gauss(
        |t| {
            let (xi, x) = shell_arg(t, z1, z2, hf, a);
            abs_pow(xi, a - 1.0) * xi.signum() * varphi_deriv(x)
        },
        0.0,
        1.0,
        THETA_PANELS,
        THETA_ORDER,
    )
}

/// Imaginary part of `eta~`.
pub fn eta_tilde_eval(z1: Zeta, z2: Zeta, h: DyadicIndex, p: &DispersionParams) -> f64 {
    let (hf, a) = (h.as_f64(), p.alpha());
    let pre = -a * hf.powf(1.0 / a - 1.0);
    pre * composite_gauss(
        |t| {
            let xi = t * z1.0 + z2.0;
            if xi == 0.0 {
                0.0
            } else {
                abs_pow(xi, a - 1.0) * xi.signum()
            }
        },
        0.0,
        1.0,
        THETA_PANELS,
        THETA_ORDER,
    )
}
