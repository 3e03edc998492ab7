//! Nonlinear evolution by integrating-factor RK4 with 2/3-rule
//! dealiasing, conservation monitoring, the dilation-symmetry harness and
//! the binary coefficient format.
//!
//! The equation is written in Fourier variables as
//! `u_hat_t = i omega u_hat + (i xi / 2) F(u^2)`. The interaction variable
//! `w = e^{-i t omega} u_hat` is advanced by classical RK4; the phase
//! `e^{i t omega}` is evaluated exactly at each step time.

mod config;
mod io;
mod scaling;
mod stepper;

pub use config::{InitialData, Preset, SimConfig};
pub use io::{read_coefficients, read_trajectory_frames, write_coefficients, write_trajectory_frames};
pub use scaling::{scaled_config, scaled_solution_check, NormScaling, ScalingReport};
pub use stepper::{dealias, dealias_mask, evolve, simulate, Monitor, Trajectory, BLOWUP_FACTOR};
