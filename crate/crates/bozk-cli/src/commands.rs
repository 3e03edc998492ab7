//! Subcommands: configuration schema and runner for each experiment.

use anyhow::{anyhow, bail, Context, Result};
use bozk::estimates_lab::{
    dilation_exponent, inflation_sweep, inflation_time_sweep, kernel_decay_sweep, kernel_n_sweep,
    lemma_tech_check, mollifier_rates, strichartz_exponent, strichartz_exponents, strichartz_sweep,
    trilinear_sweep, IllposedParams, KernelQuadrature, PicardQuadrature, StrichartzMode,
    StrichartzSetup, TrilinearAxis, TrilinearCase, TrilinearConfig, TrilinearLattice,
};
use bozk::lp_toolkit::DyadicIndex;
use bozk::pseudo_product::{coercivity_report, EnergyVariant};
use bozk::solver::{
    read_coefficients, scaled_solution_check, simulate, write_coefficients, write_trajectory_frames,
    InitialData, Preset, SimConfig,
};
use bozk::spectral_core::{DispersionParams, Grid2D};
use serde_json::{Map, Value};

use crate::config::{Config, KeySpec, Kind};
use crate::output::{fnv1a_hex, jnum, sweep_json, Artifacts, Cell};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Simulate,
    Strichartz,
    KernelDecay,
    Inflation,
    Trilinear,
    TechLemma,
    Energy,
    Scaling,
    Mollifier,
}

/// One acceptance assertion of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub results: Map<String, Value>,
    /// Input files read besides the configuration: `(path, digest)`.
    pub inputs: Vec<(String, String)>,
}

const fn real(key: &'static str, default: &'static str, min: f64, max: f64, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        kind: Kind::Real {
            min,
            max,
            max_open: false,
        },
        help,
    }
}

const fn real_open(key: &'static str, default: &'static str, min: f64, max: f64, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        kind: Kind::Real {
            min,
            max,
            max_open: true,
        },
        help,
    }
}

const fn pos(key: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        kind: Kind::Positive,
        help,
    }
}

const fn int(key: &'static str, default: &'static str, min: u64, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        kind: Kind::Int { min, max: u64::MAX },
        help,
    }
}

const fn pow2(key: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        kind: Kind::Pow2,
        help,
    }
}

const fn flag(key: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        kind: Kind::Bool,
        help,
    }
}

const fn choice(key: &'static str, default: &'static str, c: &'static [&'static str], help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        kind: Kind::Choice(c),
        help,
    }
}

const fn list(key: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        kind: Kind::RealList,
        help,
    }
}

const fn seed(default: &'static str) -> KeySpec {
    int("seed", default, 0, "RNG seed (ChaCha20 substreams)")
}

const ALPHA_HELP: &str = "dispersion exponent";

const SIMULATE: &[KeySpec] = &[
    real("alpha", "2", 1.0, 2.0, ALPHA_HELP),
    seed("0"),
    pow2("grid.nx", "128", "x lattice size"),
    pow2("grid.ny", "128", "y lattice size"),
    pos("grid.lx", "16pi", "x box length"),
    pos("grid.ly", "16pi", "y box length"),
    pos("time.dt", "1e-3", "time step"),
    pos("time.t_end", "1", "final time (integer multiple of dt)"),
    int("time.monitor_stride", "100", 1, "steps between stored frames"),
    choice("data.kind", "gaussian", &["gaussian", "random", "zero", "file"], "initial data"),
    pos("data.amplitude", "0.5", "gaussian peak value"),
    pos("data.sigma_x", "1", "gaussian x width"),
    pos("data.sigma_y", "1", "gaussian y width"),
    pos("data.l2_norm", "0.1", "random data L^2 norm"),
    pos("data.k0", "4", "random data spectral envelope scale"),
    KeySpec {
        key: "data.file",
        default: "",
        kind: Kind::Text,
        help: "coefficient file for data.kind = file",
    },
    flag("solver.dealias", "true", "2/3-rule dealiasing"),
    flag("solver.nonlinear", "true", "include u u_x"),
];

const STRICHARTZ: &[KeySpec] = &[
    real("alpha", "1.5", 1.0, 2.0, ALPHA_HELP),
    seed("7"),
    choice("mode", "localized", &["localized", "global"], "estimate variant"),
    KeySpec {
        key: "theta",
        default: "auto",
        kind: Kind::AutoReal { min: 0.0, max: 1.0 },
        help: "interpolation parameter; auto = L^4 point (localized) or 1/2 (global)",
    },
    real_open("epsilon", "0.05", 0.0, 1.0, "loss exponent"),
    pos("delta", "0.1", "critical band half-width"),
    int("n_min", "8", 2, "smallest dyadic N"),
    int("n_max", "256", 2, "largest dyadic N"),
    int("trials", "32", 1, "random data per N"),
    pow2("setup.nx", "256", "x lattice of the dilated box"),
    pow2("setup.ny", "128", "y lattice of the dilated box"),
    pos("setup.box_x", "128", "dilated x box length"),
    pos("setup.box_y", "64", "dilated y box length"),
    pos("setup.window", "2", "dilated time window |t'| <= window"),
    int("setup.samples", "129", 3, "time samples (odd)"),
    int("setup.packets", "3", 1, "wave packets per datum"),
    pos("setup.mu_cut", "1.5", "mu' cutoff of the data profile"),
];

const KERNEL: &[KeySpec] = &[
    real("alpha", "1.5", 1.0, 2.0, ALPHA_HELP),
    seed("0"),
    real_open("delta_frac", "0.95", 0.0, 1.0, "band parameter as a fraction of B"),
    int("n", "64", 2, "dyadic N of the time sweep"),
    list("scaled_times", "8,16,32,64,128,256", "time sweep in T = t N^(alpha+1)"),
    list("n_list", "auto", "N sweep; auto = dyadic range ending at n_max with T <= t_cap"),
    int("n_max", "256", 2, "largest N of the automatic N sweep"),
    pos("t_scaled", "8", "T at the smallest N of the N sweep"),
    pos("t_cap", "512", "largest T of the automatic N sweep"),
    pos("quad.margin", "200", "margin around the stationary region"),
    int("quad.candidates", "4", 1, "coarse maxima refined"),
    pos("quad.doubling_tol", "0.01", "tolerated relative change under lattice doubling"),
];

const INFLATION: &[KeySpec] = &[
    real_open("alpha", "1", 1.0, 2.0, ALPHA_HELP),
    seed("0"),
    real_open("epsilon", "0.05", 0.0, 1.0, "box height exponent"),
    pos("delta", "0.05", "gamma = N^-(alpha + delta)"),
    real("s", "0.5", 0.0, 10.0, "Sobolev index"),
    int("n_exp_min", "6", 1, "smallest log2 N"),
    int("n_exp_max", "10", 1, "largest log2 N"),
    pos("t", "1e-5", "time of the N sweep"),
    list("times", "1e-4,2e-4,5e-4,1e-3", "times of the small-time sweep"),
    pos("time_n", "64", "N of the small-time sweep"),
    pos("band_ratio_max", "20", "largest accepted C/c of the phase band"),
    int("quad.order", "6", 1, "Gauss order"),
    int("quad.inner_panels", "2", 1, "inner panels"),
    int("quad.outer_panels", "2", 1, "outer panels"),
];

const TRILINEAR: &[KeySpec] = &[
    real("alpha", "1.5", 1.0, 2.0, ALPHA_HELP),
    seed("1"),
    choice("case", "c1", &["c1", "c2a", "c2b", "c3"], "frequency configuration"),
    list("values", "auto", "swept dyadic values (H_min, H_max or N)"),
    pos("spacing", "0.35", "zeta lattice spacing"),
    int("trials", "16", 1, "random functions per point"),
    int("l_equal", "16384", 1, "common modulation of case c1"),
];

const TECH_LEMMA: &[KeySpec] = &[
    real("alpha", "1", 1.0, 2.0, ALPHA_HELP),
    seed("0"),
    pos("delta", "0.1", "band half-width"),
    int("samples", "100000", 1, "admissible pairs"),
];

const ENERGY: &[KeySpec] = &[
    real("alpha", "1.5", 1.0, 2.0, ALPHA_HELP),
    seed("5"),
    pow2("grid.n", "64", "lattice size in each direction"),
    pow2("grid.max", "64", "pseudo-product lattice cap"),
    pos("grid.box", "16pi", "box length"),
    pos("data.l2_norm", "0.01", "L^2 norm of the random data"),
    pos("data.k0", "4", "random data spectral envelope scale"),
    pos("time.dt", "1e-2", "time step"),
    pos("time.t_end", "1", "final time"),
    int("time.stride", "10", 1, "steps between stored frames"),
    real("s", "0.5", 0.0, 10.0, "Sobolev index of the energy"),
    choice("variant", "same", &["same", "difference"], "energy normalization"),
    pos("smallness", "0.01", "largest accepted ||u||_{B^0}"),
];

const SCALING: &[KeySpec] = &[
    real("alpha", "2", 1.0, 2.0, ALPHA_HELP),
    seed("0"),
    pos("lambda", "0.5", "dilation factor"),
    list("s_values", "0,0.5", "E^s indices of the norm comparison"),
    pow2("grid.nx", "64", "x lattice size"),
    pow2("grid.ny", "64", "y lattice size"),
    pos("grid.lx", "16pi", "x box length"),
    pos("grid.ly", "16pi", "y box length"),
    pos("data.amplitude", "1e-6", "gaussian peak value"),
    pos("data.sigma", "2", "gaussian width"),
    pos("time.dt", "1e-2", "base time step"),
    pos("time.t_end", "0.2", "base final time"),
    pos("tol.discrepancy", "1e-6", "largest accepted matched-time discrepancy"),
    pos("tol.norm", "0.1", "relative slack of the norm comparison"),
];

const MOLLIFIER: &[KeySpec] = &[
    real("alpha", "1.5", 1.0, 2.0, ALPHA_HELP),
    seed("1"),
    real("s", "0.5", 0.0, 10.0, "Sobolev index of the data"),
    pos("delta", "0.25", "smoothing gain"),
    list("lambdas", "auto", "mollifier parameters; auto = 10^-1.75 .. 10^-0.25"),
    pow2("n", "1024", "lattice size (spacing 1/4)"),
];

impl Command {
    #[cfg(test)]
    pub const ALL: [Command; 9] = [
        Command::Simulate,
        Command::Strichartz,
        Command::KernelDecay,
        Command::Inflation,
        Command::Trilinear,
        Command::TechLemma,
        Command::Energy,
        Command::Scaling,
        Command::Mollifier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Strichartz => "strichartz",
            Command::KernelDecay => "kernel-decay",
            Command::Inflation => "inflation",
            Command::Trilinear => "trilinear",
            Command::TechLemma => "tech-lemma",
            Command::Energy => "energy",
            Command::Scaling => "scaling",
            Command::Mollifier => "mollifier",
        }
    }

    pub fn schema(self) -> &'static [KeySpec] {
        match self {
            Command::Simulate => SIMULATE,
            Command::Strichartz => STRICHARTZ,
            Command::KernelDecay => KERNEL,
            Command::Inflation => INFLATION,
            Command::Trilinear => TRILINEAR,
            Command::TechLemma => TECH_LEMMA,
            Command::Energy => ENERGY,
            Command::Scaling => SCALING,
            Command::Mollifier => MOLLIFIER,
        }
    }

    pub fn run(self, cfg: &Config, out: &mut Artifacts) -> Result<Outcome> {
        match self {
            Command::Simulate => run_simulate(cfg, out),
            Command::Strichartz => run_strichartz(cfg, out),
            Command::KernelDecay => run_kernel(cfg, out),
            Command::Inflation => run_inflation(cfg, out),
            Command::Trilinear => run_trilinear(cfg, out),
            Command::TechLemma => run_tech_lemma(cfg, out),
            Command::Energy => run_energy(cfg, out),
            Command::Scaling => run_scaling(cfg, out),
            Command::Mollifier => run_mollifier(cfg, out),
        }
    }
}

fn params(cfg: &Config) -> Result<DispersionParams> {
    Ok(DispersionParams::new(cfg.real("alpha"))?)
}

fn dyadic(v: f64, what: &str) -> Result<DyadicIndex> {
    if v.fract() != 0.0 || v < 1.0 || v > 2f64.powi(62) {
        bail!("{what} = {v} is not a dyadic integer");
    }
    DyadicIndex::new(v as u64).with_context(|| format!("{what} = {v}"))
}

fn dyadic_span(lo: u64, hi: u64, what: &str) -> Result<Vec<DyadicIndex>> {
    let (a, b) = (dyadic(lo as f64, what)?, dyadic(hi as f64, what)?);
    if a.value() > b.value() {
        bail!("{what}: empty range {lo}..{hi}");
    }
    Ok((a.exp()..=b.exp()).map(DyadicIndex::from_exp).collect())
}

fn insert(m: &mut Map<String, Value>, k: &str, v: Value) {
    m.insert(k.to_string(), v);
}

fn run_simulate(cfg: &Config, out: &mut Artifacts) -> Result<Outcome> {
    let p = params(cfg)?;
    let mut outcome = Outcome::default();
    let mut grid = Grid2D::new(
        cfg.usize("grid.nx"),
        cfg.usize("grid.ny"),
        cfg.real("grid.lx"),
        cfg.real("grid.ly"),
    )?;
    let initial = match cfg.text("data.kind") {
        "gaussian" => InitialData::Preset(Preset::Gaussian {
            amplitude: cfg.real("data.amplitude"),
            sigma_x: cfg.real("data.sigma_x"),
            sigma_y: cfg.real("data.sigma_y"),
        }),
        "random" => InitialData::Preset(Preset::RandomSmooth {
            l2_norm: cfg.real("data.l2_norm"),
            k0: cfg.real("data.k0"),
        }),
        "zero" => InitialData::Preset(Preset::Zero),
        _ => {
            let path = cfg.text("data.file");
            if path.is_empty() {
                bail!("data.kind = file needs data.file");
            }
            let bytes = std::fs::read(path).with_context(|| format!("cannot read {path}"))?;
            let (field, a) = read_coefficients(&mut bytes.as_slice())?;
            if a != p.alpha() {
                bail!("coefficient file was written for alpha = {a}, config has alpha = {}", p.alpha());
            }
            outcome.inputs.push((path.to_string(), fnv1a_hex(&bytes)));
            grid = field.grid;
            InitialData::Coefficients(field)
        }
    };
    let mut sc = SimConfig::new(grid, p, cfg.real("time.dt"), cfg.real("time.t_end"), initial);
    sc.dealias = cfg.flag("solver.dealias");
    sc.nonlinear = cfg.flag("solver.nonlinear");
    sc.monitor_stride = cfg.usize("time.monitor_stride");
    sc.seed = cfg.int("seed");
    let traj = simulate(&sc)?;

    let header: Vec<String> = ["t", "M", "H", "Es_0", "Es_05", "Es_salpha"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<Cell>> = traj
        .monitors
        .iter()
        .map(|m| {
            let mut r: Vec<Cell> = vec![m.t.into(), m.mass.into(), m.hamiltonian.into()];
            r.extend(m.es.iter().map(|&v| Cell::from(v)));
            r
        })
        .collect();
    out.csv("monitor.csv", &header, &rows)?;
    let mut buf = Vec::new();
    write_trajectory_frames(&mut buf, &traj.states, p.alpha())?;
    out.write("trajectory.bin", &buf)?;
    let last = traj.states.last().ok_or_else(|| anyhow!("empty trajectory"))?;
    let mut buf = Vec::new();
    write_coefficients(&mut buf, last, p.alpha())?;
    out.write("final.bin", &buf)?;

    let (m0, m1) = (&traj.monitors[0], traj.monitors.last().expect("nonempty"));
    let rel = |a: f64, b: f64| if a != 0.0 { (b - a).abs() / a.abs() } else { (b - a).abs() };
    let r = &mut outcome.results;
    insert(r, "steps", Value::from(sc.steps()?));
    insert(r, "frames", Value::from(traj.states.len()));
    insert(r, "t_final", jnum(m1.t));
    insert(r, "mass_drift", jnum(rel(m0.mass, m1.mass)));
    insert(r, "hamiltonian_drift", jnum(rel(m0.hamiltonian, m1.hamiltonian)));
    insert(r, "dt_max_omega", jnum(sc.dt * sc.max_omega()));
    insert(r, "monitor_s", Value::Array(traj.monitor_s.iter().map(|&s| jnum(s)).collect()));
    Ok(outcome)
}

fn run_strichartz(cfg: &Config, out: &mut Artifacts) -> Result<Outcome> {
    let p = params(cfg)?;
    let mode: StrichartzMode = cfg.text("mode").parse()?;
    let eps = cfg.real("epsilon");
    let theta = cfg.auto_real("theta").unwrap_or(match mode {
        StrichartzMode::Localized => 1.0 / (2.0 - eps),
        StrichartzMode::Global => 0.5,
    });
    let ns = dyadic_span(cfg.int("n_min"), cfg.int("n_max"), "N")?;
    let setup = StrichartzSetup {
        nx: cfg.usize("setup.nx"),
        ny: cfg.usize("setup.ny"),
        box_len: (cfg.real("setup.box_x"), cfg.real("setup.box_y")),
        window: cfg.real("setup.window"),
        samples: cfg.usize("setup.samples"),
        packets: cfg.usize("setup.packets"),
        mu_cut: cfg.real("setup.mu_cut"),
    };
    let sweep = strichartz_sweep(
        mode,
        &p,
        theta,
        eps,
        cfg.real("delta"),
        &ns,
        cfg.usize("trials"),
        cfg.int("seed"),
        &setup,
    )?;
    out.sweep_csv("sweep.csv", &sweep)?;
    let (q, pe) = strichartz_exponents(mode, theta, eps)?;
    let claimed = strichartz_exponent(mode, theta, eps, p.alpha());
    let limit = match mode {
        StrichartzMode::Localized => -p.alpha() / 8.0 + 0.1,
        StrichartzMode::Global => -(theta / 6.0) * (p.alpha() - 0.5) + 0.1,
    };
    let mut o = Outcome::default();
    o.checks.push(Check::new(
        "slope",
        sweep.fit.slope <= limit,
        format!("fitted N-slope {:.4} <= {limit:.4}", sweep.fit.slope),
    ));
    o.checks.push(Check::new(
        "r_squared",
        sweep.fit.r_squared >= 0.9,
        format!("R^2 {:.4} >= 0.9", sweep.fit.r_squared),
    ));
    let r = &mut o.results;
    insert(r, "sweep", sweep_json(&sweep));
    insert(r, "theta", jnum(theta));
    insert(r, "q", jnum(q));
    insert(r, "p", jnum(pe));
    insert(r, "claimed_exponent", jnum(claimed));
    insert(r, "dilation_exponent", jnum(dilation_exponent(q, pe, p.alpha())));
    insert(r, "slope_limit", jnum(limit));
    Ok(o)
}

/// Dyadic N values ending at `n_max` whose rescaled times stay below `t_cap`.
fn kernel_auto_ns(alpha: f64, n_max: u64, t_scaled: f64, t_cap: f64) -> Result<Vec<DyadicIndex>> {
    let top = dyadic(n_max as f64, "n_max")?;
    let mut lo = top.exp();
    while lo > 1 && t_scaled * 2f64.powf((top.exp() - lo + 1) as f64 * (alpha + 1.0)) <= t_cap {
        lo -= 1;
    }
    if lo == top.exp() {
        bail!("t_cap = {t_cap} leaves a single N; raise t_cap or lower t_scaled");
    }
    Ok((lo..=top.exp()).map(DyadicIndex::from_exp).collect())
}

fn run_kernel(cfg: &Config, out: &mut Artifacts) -> Result<Outcome> {
    let p = params(cfg)?;
    let a = p.alpha();
    let delta = cfg.real("delta_frac") * p.b();
    let q = KernelQuadrature {
        margin: cfg.real("quad.margin"),
        candidates: cfg.usize("quad.candidates"),
        doubling_tol: cfg.real("quad.doubling_tol"),
    };
    let n = dyadic(cfg.int("n") as f64, "n")?;
    let nscale = n.as_f64().powf(a + 1.0);
    let times: Vec<f64> = cfg
        .list("scaled_times")
        .expect("scaled_times has no auto form")
        .iter()
        .map(|t| t / nscale)
        .collect();
    let ts = kernel_decay_sweep(n, delta, &p, &times, &q)?;
    let ns = match cfg.list("n_list") {
        Some(v) => v.iter().map(|&x| dyadic(x, "n_list")).collect::<Result<Vec<_>>>()?,
        None => kernel_auto_ns(a, cfg.int("n_max"), cfg.real("t_scaled"), cfg.real("t_cap"))?,
    };
    let t_fixed = cfg.real("t_scaled") / ns[0].as_f64().powf(a + 1.0);
    let nsw = kernel_n_sweep(&ns, t_fixed, delta, &p, &q)?;
    out.sweep_csv("t_sweep.csv", &ts)?;
    out.sweep_csv("n_sweep.csv", &nsw)?;
    let n_limit = -a / 2.0 + 0.15;
    let mut o = Outcome::default();
    o.checks.push(Check::new(
        "t_slope",
        (-1.15..=-0.85).contains(&ts.fit.slope),
        format!("fitted t-slope {:.4} in [-1.15, -0.85]", ts.fit.slope),
    ));
    o.checks.push(Check::new(
        "n_slope",
        nsw.fit.slope <= n_limit,
        format!("fitted N-slope {:.4} <= {n_limit:.4}", nsw.fit.slope),
    ));
    o.checks.push(Check::new(
        "quadrature",
        !ts.flagged && !nsw.flagged,
        format!("lattice doubling within {}", q.doubling_tol),
    ));
    let r = &mut o.results;
    insert(r, "delta", jnum(delta));
    insert(r, "t_sweep", sweep_json(&ts));
    insert(r, "n_sweep", sweep_json(&nsw));
    insert(r, "n_sweep_t", jnum(t_fixed));
    Ok(o)
}

fn run_inflation(cfg: &Config, out: &mut Artifacts) -> Result<Outcome> {
    let p = params(cfg)?;
    let (eps, delta, s) = (cfg.real("epsilon"), cfg.real("delta"), cfg.real("s"));
    let quad = PicardQuadrature {
        order: cfg.usize("quad.order"),
        inner_panels: cfg.usize("quad.inner_panels"),
        outer_panels: cfg.usize("quad.outer_panels"),
    };
    let (k0, k1) = (cfg.int("n_exp_min"), cfg.int("n_exp_max"));
    if k0 >= k1 || k1 > 30 {
        bail!("n_exp_min = {k0}, n_exp_max = {k1}: need n_exp_min < n_exp_max <= 30");
    }
    let ns: Vec<f64> = (k0..=k1).map(|k| 2f64.powi(k as i32)).collect();
    let sweep = inflation_sweep(p.alpha(), s, eps, delta, &ns, cfg.real("t"), &quad)?;
    let ip = IllposedParams::new(cfg.real("time_n"), eps, delta, s, p)?;
    let times = cfg.list("times").unwrap_or_else(|| vec![1e-4, 2e-4, 5e-4, 1e-3]);
    let tsw = inflation_time_sweep(&ip, &times, &quad)?;
    out.sweep_csv("sweep.csv", &sweep)?;
    out.sweep_csv("time_sweep.csv", &tsw)?;

    let predicted = ip.predicted_exponent();
    let band = |name: &str| -> Vec<f64> {
        sweep
            .points
            .iter()
            .map(|pt| pt.params.iter().find(|(k, _)| k == name).map_or(f64::NAN, |(_, v)| *v))
            .collect()
    };
    let band_ratio = band("omega_band_max")
        .iter()
        .zip(band("omega_band_min"))
        .map(|(hi, lo)| hi / lo)
        .fold(0.0, f64::max);
    let ratio_max = cfg.real("band_ratio_max");
    let mut o = Outcome::default();
    o.checks.push(Check::new(
        "slope",
        (sweep.fit.slope - predicted).abs() <= 0.15,
        format!("fitted N-slope {:.4} within 0.15 of {predicted:.4}", sweep.fit.slope),
    ));
    o.checks.push(Check::new(
        "r_squared",
        sweep.fit.r_squared >= 0.9,
        format!("R^2 {:.6} >= 0.9", sweep.fit.r_squared),
    ));
    o.checks.push(Check::new(
        "time_slope",
        (tsw.fit.slope - 1.0).abs() <= 0.05,
        format!("small-time slope {:.5} within 0.05 of 1", tsw.fit.slope),
    ));
    o.checks.push(Check::new(
        "phase_band",
        band_ratio <= ratio_max,
        format!("largest C/c of |Omega|/(gamma N^alpha) is {band_ratio:.3e}, limit {ratio_max}"),
    ));
    o.checks.push(Check::new(
        "quadrature",
        !sweep.flagged && !tsw.flagged,
        "panel doubling within 1%".to_string(),
    ));
    let r = &mut o.results;
    insert(r, "predicted_exponent", jnum(predicted));
    insert(r, "band_ratio", jnum(band_ratio));
    insert(r, "sweep", sweep_json(&sweep));
    insert(r, "time_sweep", sweep_json(&tsw));
    Ok(o)
}

fn p2(x: f64) -> Result<DyadicIndex> {
    let e = x.log2().ceil().max(0.0);
    if e > 62.0 {
        bail!("dyadic value {x} out of range");
    }
    Ok(DyadicIndex::from_exp(e as u32))
}

/// Sweep configurations of each case; see the README for the rationale.
pub fn trilinear_configs(case: TrilinearCase, alpha: f64, values: &[f64], l_equal: u64) -> Result<Vec<TrilinearConfig>> {
    values
        .iter()
        .map(|&v| {
            let d = dyadic(v, "trilinear value")?;
            Ok(match case {
                TrilinearCase::C1 => TrilinearConfig {
                    case,
                    h: [d; 3],
                    n: None,
                    l: [dyadic(l_equal as f64, "l_equal")?; 3],
                },
                TrilinearCase::C2a | TrilinearCase::C2b => {
                    let big = p2(v * (8.0 / (alpha + 1.0)).powf(1.0 / alpha))?;
                    let one = DyadicIndex::from_exp(0);
                    let l = if case == TrilinearCase::C2a { [one, big, big] } else { [one, one, big] };
                    TrilinearConfig {
                        case,
                        h: [d, DyadicIndex::from_exp(2), d],
                        n: None,
                        l,
                    }
                }
                TrilinearCase::C3 => {
                    let h = p2((alpha + 1.0) * v.powf(alpha))?;
                    let one = DyadicIndex::from_exp(0);
                    TrilinearConfig {
                        case,
                        h: [h; 3],
                        n: Some([d; 3]),
                        l: [one, one, p2(8.0 * v.powf(alpha + 1.0))?],
                    }
                }
            })
        })
        .collect()
}

fn run_trilinear(cfg: &Config, out: &mut Artifacts) -> Result<Outcome> {
    let p = params(cfg)?;
    let case: TrilinearCase = cfg.text("case").parse()?;
    let values = cfg.list("values").unwrap_or_else(|| match case {
        TrilinearCase::C1 => vec![4.0, 8.0, 16.0, 32.0, 64.0],
        TrilinearCase::C2a | TrilinearCase::C2b => vec![32.0, 64.0, 128.0, 256.0],
        TrilinearCase::C3 => vec![4.0, 8.0, 16.0],
    });
    let configs = trilinear_configs(case, p.alpha(), &values, cfg.int("l_equal"))?;
    let axis = match case {
        TrilinearCase::C1 => TrilinearAxis::HMin,
        TrilinearCase::C2a | TrilinearCase::C2b => TrilinearAxis::HMax,
        TrilinearCase::C3 => TrilinearAxis::NMax,
    };
    let h = cfg.real("spacing");
    let lat = TrilinearLattice { dxi: h, dmu: h };
    let sweep = trilinear_sweep(&configs, axis, &p, &lat, cfg.usize("trials"), cfg.int("seed"))?;
    out.sweep_csv("sweep.csv", &sweep)?;
    let slope = sweep.fit.slope;
    let (passed, detail) = if case == TrilinearCase::C3 {
        (slope <= 0.05, format!("fitted slope {slope:.4} <= 0.05"))
    } else {
        (slope.abs() <= 0.1, format!("|fitted slope| {:.4} <= 0.1", slope.abs()))
    };
    let mut o = Outcome::default();
    o.checks.push(Check::new("no_growth", passed, detail));
    insert(&mut o.results, "sweep", sweep_json(&sweep));
    Ok(o)
}

fn run_tech_lemma(cfg: &Config, out: &mut Artifacts) -> Result<Outcome> {
    let p = params(cfg)?;
    let r = lemma_tech_check(cfg.real("delta"), &p, cfg.usize("samples"), cfg.int("seed"))?;
    let header: Vec<String> = [
        "alpha",
        "delta",
        "seed",
        "samples",
        "violations",
        "g",
        "f1",
        "f2",
        "f3",
        "f",
        "max_slack_ratio",
        "worst_xi1",
        "worst_mu1",
        "worst_xi2",
        "worst_mu2",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let c = r.constants;
    let ((x1, m1), (x2, m2)) = r.worst_pair;
    let row: Vec<Cell> = vec![
        r.alpha.into(),
        r.delta.into(),
        r.seed.into(),
        r.samples.into(),
        r.violations.into(),
        c.g.into(),
        c.f1.into(),
        c.f2.into(),
        c.f3.into(),
        c.f.into(),
        r.max_slack_ratio.into(),
        x1.into(),
        m1.into(),
        x2.into(),
        m2.into(),
    ];
    out.csv("report.csv", &header, &[row])?;
    let mut o = Outcome::default();
    o.checks.push(Check::new(
        "violations",
        r.violations == 0,
        format!("{} violations in {} samples", r.violations, r.samples),
    ));
    let res = &mut o.results;
    insert(res, "sampling", Value::String(r.header.to_string()));
    insert(res, "f", jnum(c.f));
    insert(res, "f1", jnum(c.f1));
    insert(res, "f2", jnum(c.f2));
    insert(res, "f3", jnum(c.f3));
    insert(res, "violations", Value::from(r.violations));
    insert(res, "max_slack_ratio", jnum(r.max_slack_ratio));
    Ok(o)
}

fn run_energy(cfg: &Config, out: &mut Artifacts) -> Result<Outcome> {
    let p = params(cfg)?;
    let n = cfg.usize("grid.n");
    let cap = cfg.usize("grid.max");
    if n > cap {
        bail!("grid.n = {n} exceeds the pseudo-product cap grid.max = {cap}");
    }
    let l = cfg.real("grid.box");
    let grid = Grid2D::new(n, n, l, l)?;
    let init = InitialData::Preset(Preset::RandomSmooth {
        l2_norm: cfg.real("data.l2_norm"),
        k0: cfg.real("data.k0"),
    });
    let mut sc = SimConfig::new(grid, p, cfg.real("time.dt"), cfg.real("time.t_end"), init);
    sc.monitor_stride = cfg.usize("time.stride");
    sc.seed = cfg.int("seed");
    let traj = simulate(&sc)?;
    let variant = match cfg.text("variant") {
        "same" => EnergyVariant::SameField,
        _ => EnergyVariant::Difference,
    };
    let s = cfg.real("s");
    let rep = coercivity_report(&traj.states, &traj.states, s, &p, variant)?;
    let header: Vec<String> = [
        "alpha",
        "s",
        "H",
        "resolved",
        "min_ratio",
        "max_ratio",
        "max_abs_correction",
        "max_shell_energy",
        "sup_abs_energy",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<Cell>> = rep
        .shells
        .iter()
        .map(|sh| {
            vec![
                p.alpha().into(),
                s.into(),
                sh.h.value().into(),
                sh.resolved.into(),
                sh.min_ratio.into(),
                sh.max_ratio.into(),
                sh.max_abs_correction.into(),
                sh.max_shell_energy.into(),
                sh.sup_abs_energy.into(),
            ]
        })
        .collect();
    out.csv("shells.csv", &header, &rows)?;
    let resolved: Vec<_> = rep.shells.iter().filter(|sh| sh.resolved).collect();
    let lo = resolved.iter().map(|sh| sh.min_ratio).fold(f64::INFINITY, f64::min);
    let hi = resolved.iter().map(|sh| sh.max_ratio).fold(f64::NEG_INFINITY, f64::max);
    let small = cfg.real("smallness");
    let mut o = Outcome::default();
    o.checks.push(Check::new(
        "small_data",
        rep.b0_norm_u <= small,
        format!("||u||_B0 = {:.4e} <= {small}", rep.b0_norm_u),
    ));
    o.checks.push(Check::new(
        "shell_ratios",
        !resolved.is_empty() && lo >= 0.5 && hi <= 2.0,
        format!("{} resolved shells, ratios in [{lo:.6}, {hi:.6}] within [1/2, 2]", resolved.len()),
    ));
    let r = &mut o.results;
    insert(r, "frames", Value::from(traj.states.len()));
    insert(r, "b0_norm_u", jnum(rep.b0_norm_u));
    insert(r, "bs_norm_v", jnum(rep.bs_norm_v));
    insert(r, "es_t", jnum(rep.es_t));
    insert(r, "inferred_constant", jnum(rep.inferred_constant));
    insert(r, "min_ratio", jnum(lo));
    insert(r, "max_ratio", jnum(hi));
    Ok(o)
}

fn run_scaling(cfg: &Config, out: &mut Artifacts) -> Result<Outcome> {
    let p = params(cfg)?;
    let grid = Grid2D::new(
        cfg.usize("grid.nx"),
        cfg.usize("grid.ny"),
        cfg.real("grid.lx"),
        cfg.real("grid.ly"),
    )?;
    let sigma = cfg.real("data.sigma");
    let init = InitialData::Preset(Preset::Gaussian {
        amplitude: cfg.real("data.amplitude"),
        sigma_x: sigma,
        sigma_y: sigma,
    });
    let mut sc = SimConfig::new(grid, p, cfg.real("time.dt"), cfg.real("time.t_end"), init);
    sc.monitor_stride = usize::MAX;
    sc.seed = cfg.int("seed");
    let lambda = cfg.real("lambda");
    let s_values = cfg.list("s_values").unwrap_or_else(|| vec![0.0, 0.5]);
    let rep = scaled_solution_check(&sc, lambda, &s_values)?;
    let header: Vec<String> = ["alpha", "lambda", "s", "measured", "bound", "ratio_to_bound"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<Cell>> = rep
        .norms
        .iter()
        .map(|n| {
            vec![
                p.alpha().into(),
                lambda.into(),
                n.s.into(),
                n.measured.into(),
                n.bound.into(),
                n.ratio_to_bound.into(),
            ]
        })
        .collect();
    out.csv("norms.csv", &header, &rows)?;
    let (tol_d, tol_n) = (cfg.real("tol.discrepancy"), cfg.real("tol.norm"));
    let worst = rep.norms.iter().map(|n| n.ratio_to_bound).fold(0.0, f64::max);
    let expo_err = (rep.l2_exponent_measured - rep.l2_exponent_predicted).abs() / rep.l2_exponent_predicted.abs().max(1e-300);
    let mut o = Outcome::default();
    o.checks.push(Check::new(
        "discrepancy",
        rep.discrepancy <= tol_d,
        format!("matched-time discrepancy {:.3e} <= {tol_d:e}", rep.discrepancy),
    ));
    o.checks.push(Check::new(
        "norm_bound",
        worst <= 1.0 + tol_n,
        format!("largest measured/bound {worst:.6} <= {}", 1.0 + tol_n),
    ));
    o.checks.push(Check::new(
        "l2_exponent",
        expo_err <= tol_n,
        format!(
            "L^2 exponent {:.6} within {tol_n} relative of {:.6}",
            rep.l2_exponent_measured, rep.l2_exponent_predicted
        ),
    ));
    let r = &mut o.results;
    insert(r, "discrepancy", jnum(rep.discrepancy));
    insert(r, "base_time", jnum(rep.base_time));
    insert(r, "scaled_time", jnum(rep.scaled_time));
    insert(r, "l2_exponent_measured", jnum(rep.l2_exponent_measured));
    insert(r, "l2_exponent_predicted", jnum(rep.l2_exponent_predicted));
    Ok(o)
}

/// Quarter decades from `10^-1.75` to `10^-0.25`.
pub fn default_lambdas() -> Vec<f64> {
    (0..7).map(|i| 10f64.powf(-1.75 + 0.25 * i as f64)).collect()
}

fn run_mollifier(cfg: &Config, out: &mut Artifacts) -> Result<Outcome> {
    let p = params(cfg)?;
    let delta = cfg.real("delta");
    let lambdas = cfg.list("lambdas").unwrap_or_else(default_lambdas);
    let rep = mollifier_rates(&p, cfg.real("s"), delta, &lambdas, cfg.usize("n"), cfg.int("seed"))?;
    out.sweep_csv("smoothing.csv", &rep.smoothing)?;
    out.sweep_csv("approximation.csv", &rep.approximation)?;
    let limit = -delta - 0.05;
    let mut o = Outcome::default();
    o.checks.push(Check::new(
        "smoothing_slope",
        rep.smoothing.fit.slope >= limit,
        format!("fitted lambda-slope {:.4} >= {limit:.4}", rep.smoothing.fit.slope),
    ));
    o.checks.push(Check::new(
        "approximation_decreasing",
        rep.approximation_monotone,
        "approximation ratio decreases as lambda decreases".to_string(),
    ));
    let r = &mut o.results;
    insert(r, "smoothing", sweep_json(&rep.smoothing));
    insert(r, "approximation", sweep_json(&rep.approximation));
    Ok(o)
}
