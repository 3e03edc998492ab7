use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::stepper::dealias_mask;
use crate::error::{BozkError, Result};
use crate::rng::rng_from_seed;
use crate::spectral_core::{
    abs_pow, eval_omega, transform, DispersionParams, Grid2D, RealField2D, SpectralField2D,
};

/// Built-in initial data.
#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Zero,
    /// `A exp(-((x - cx)^2 / sx^2 + (y - cy)^2 / sy^2) / 2)` centred in the box.
    Gaussian {
        amplitude: f64,
        sigma_x: f64,
        sigma_y: f64,
    },
    /// Random real field with spectral envelope `exp(-(|xi|^alpha + mu^2) / k0)`,
    /// scaled to the given `L^2` norm. Drawn from the config seed.
    RandomSmooth { l2_norm: f64, k0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Preset(Preset),
    Coefficients(SpectralField2D),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: Grid2D,
    pub params: DispersionParams,
    pub dt: f64,
    pub t_end: f64,
    pub initial: InitialData,
    pub dealias: bool,
    pub monitor_stride: usize,
    pub seed: u64,
    /// Disables the nonlinearity (linear flow only).
    pub nonlinear: bool,
    /// `s` values of the tracked `E^s` norms.
    pub monitor_s: Vec<f64>,
}

impl SimConfig {
    /// Config with defaults: dealiasing on, stride 1, seed 0, nonlinear,
    /// `E^s` monitored at `s = 0, 1/2, s_alpha + 0.05`.
    pub fn new(grid: Grid2D, params: DispersionParams, dt: f64, t_end: f64, initial: InitialData) -> Self {
        Self {
            grid,
            params,
            dt,
            t_end,
            initial,
            dealias: true,
            monitor_stride: 1,
            seed: 0,
            nonlinear: true,
            monitor_s: vec![0.0, 0.5, params.s_alpha() + 0.05],
        }
    }

    /// Number of steps `t_end / dt`, which must be an integer.
    pub fn steps(&self) -> Result<usize> {
        let n = (self.t_end / self.dt).round();
        if (n * self.dt - self.t_end).abs() > 1e-9 * self.t_end || n < 1.0 {
            return Err(BozkError::InvalidParameter(format!(
                "t_end = {} is not a positive integer multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(n as usize)
    }

    /// Largest `|omega|` over the retained (dealiased when enabled) lattice.
    pub fn max_omega(&self) -> f64 {
        let g = self.grid;
        let mask = dealias_mask(&g);
        let mut m: f64 = 0.0;
        for j in 0..g.nx() {
            for k in 0..g.ny() {
                if self.dealias && !mask[[j, k]] {
                    continue;
                }
                m = m.max(eval_omega(g.xi_at(j), g.mu_at(k), &self.params).abs());
            }
        }
        m
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(BozkError::InvalidParameter(format!("dt = {} must be > 0", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(BozkError::InvalidParameter(format!(
                "t_end = {} must satisfy t_end >= dt",
                self.t_end
            )));
        }
        if self.monitor_stride == 0 {
            return Err(BozkError::InvalidParameter("monitor_stride must be >= 1".into()));
        }
        self.steps()?;
        let w = self.max_omega();
        if self.dt * w > 2.0 * PI {
            return Err(BozkError::Unresolvable(format!(
                "dt * max|omega| = {} exceeds 2 pi",
                self.dt * w
            )));
        }
        if let InitialData::Coefficients(c) = &self.initial {
            if c.grid != self.grid {
                return Err(BozkError::GridMismatch);
            }
            if !c.hermitian {
                return Err(BozkError::InvalidParameter("initial coefficients must be hermitian".into()));
            }
        }
        Ok(())
    }

    /// Initial coefficients on the configured grid.
    pub fn initial_field(&self) -> Result<SpectralField2D> {
        let g = self.grid;
        match &self.initial {
            InitialData::Coefficients(c) => Ok(c.clone()),
            InitialData::Preset(Preset::Zero) => Ok(SpectralField2D::zeros(g, true)),
            InitialData::Preset(Preset::Gaussian {
                amplitude,
                sigma_x,
                sigma_y,
            }) => {
                let (cx, cy) = (g.lx() / 2.0, g.ly() / 2.0);
                let f = RealField2D::from_fn(g, |x, y| {
                    let r = ((x - cx) / sigma_x).powi(2) + ((y - cy) / sigma_y).powi(2);
                    amplitude * (-0.5 * r).exp()
                });
                transform(&f)
            }
            InitialData::Preset(Preset::RandomSmooth { l2_norm, k0 }) => {
                let mut rng = rng_from_seed(self.seed);
                let a = self.params.alpha();
                let c = SpectralField2D::from_fn(g, false, |xi, mu| {
                    let env = (-(abs_pow(xi, a) + mu * mu) / k0).exp();
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re, im) * env
                });
                // Real part of the synthesized field is a real field with a
                // symmetric version of the same envelope.
                let v = crate::spectral_core::inverse_transform_complex(&c)?;
                let f = RealField2D::new(g, v.mapv(|z| z.re))?;
                let out = transform(&f)?;
                let n = out.l2_norm();
                Ok(if n > 0.0 { out.scale(l2_norm / n) } else { out })
            }
        }
    }
}
