//! Operator-splitting solver for the augmented Burgers equation
//!
//! ```text
//! u_t - (u^2/2)_x = u_xx / gamma + c_nu (K*u - u + u_x),   K(z) = e^{-z} 1_{z > 0}
//! ```
//!
//! Each time step applies the viscous Burgers flow (explicit Engquist-Osher
//! finite volumes) and then the nonlocal relaxation flow, which for the
//! exponential kernel reduces to `v_t + v_tx = c_nu v_xx` and is advanced with
//! Crank-Nicolson. The crate also provides an explicit rectangle-rule solver
//! for the full equation, the exact relaxation flow in Fourier space, and the
//! self-similar viscous Burgers profile that describes large-time behavior.

pub mod asymptotics;
pub mod convolution;
pub mod error;
pub mod grid;
pub mod initial;
pub mod kernel;
pub mod params;
pub mod report;
pub mod splitting;
pub mod substeps;

pub use asymptotics::{
    decay_envelope_check, decay_metric_series, decay_metrics, rescale_field, rescale_snapshot,
    self_similar_profile, EnvelopeCheck, ProfileSpec,
};
pub use convolution::rectangle_convolution;
pub use error::{Error, Result};
pub use grid::{discrete_lp_norm, Field, GridSpec};
pub use initial::InitialData;
pub use kernel::{kernel_eval, kernel_moments, KernelMoments, KernelSpec};
pub use params::{
    cfl_max_dt, cfl_number, monotone_max_dt, PhysicalParams, DEFAULT_C_NU, DEFAULT_DX,
    DEFAULT_GAMMA,
};
pub use report::StudyReport;
pub use splitting::{
    fit_order, reference_abe_evolve, self_convergence_study, split_evolve, ConvergenceStudy,
    NonlocalBalance, RunMeta, Scheme, SchemeOptions, Snapshot, SplitSchedule, Trajectory,
};
pub use substeps::{
    burgers_substep, cn_relaxation_substep, cn_relaxation_substep_with, eo_flux,
    spectral_relaxation_exact, thomas_solve, MixedTerm, TridiagonalSystem,
};
