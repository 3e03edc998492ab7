//! Numerical experiments on the linear and bilinear estimates: kernel
//! decay, Strichartz exponents, trilinear convolution bounds, the
//! resonance inequality and the norm-inflation construction.

mod illposed;
mod kernel;
mod mollifier;
mod strichartz;
mod sweep;
mod tech_lemma;
mod trilinear;

pub use kernel::{
    kernel_decay_sweep, kernel_n_sweep, kernel_short_time_sweep, kernel_sup, KernelEvaluation,
    KernelQuadrature,
};
pub use sweep::{fit_loglog, FitTarget, SlopeFit, SweepPoint, SweepResult};
pub use trilinear::{
    check_hypothesis, claimed_bound, support_points, theta_kernel, trilinear_bound_check,
    trilinear_form, trilinear_sweep, LatticeFunction, TrilinearAxis, TrilinearCase,
    TrilinearConfig, TrilinearLattice, TrilinearPoint, COMPARABLE, MAX_SUPPORT, SEPARATION,
};
pub use tech_lemma::{
    lemma_tech_check, tech_constants, tech_sides, TechConstants, TechReport, SAMPLING_HEADER,
};
pub use strichartz::{
    dilation_exponent,
    profile_leak, strichartz_datum, strichartz_exponent, strichartz_exponents, strichartz_ratio,
    strichartz_sweep, StrichartzMode, StrichartzSetup,
};
pub use illposed::{
    duhamel_kernel, illposed_data, illposed_spectrum, inflation_sweep, inflation_time_sweep,
    picard_second_iterate, resonance_stable, BoxSpectrum, FrequencyBox, IllposedParams,
    PicardIterate, PicardQuadrature,
};
pub use mollifier::{
    mollifier_data, mollifier_grid, mollifier_rates, MollifierReport, MOLLIFIER_DATA_MARGIN,
};
