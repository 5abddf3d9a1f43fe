use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::kernel::{kernel_moments, KernelSpec};

/// Thermo-viscous parameter used in the numerical experiments.
pub const DEFAULT_GAMMA: f64 = 100.0;
/// Relaxation dispersion parameter used in the numerical experiments.
pub const DEFAULT_C_NU: f64 = 0.02;
/// Default mesh size.
pub const DEFAULT_DX: f64 = 0.1;

/// Coefficients of
/// `u_t - (u^2/2)_x = u_xx / gamma + c_nu (K*u - u + u_x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    gamma: f64,
    c_nu: f64,
    kernel: KernelSpec,
}

impl PhysicalParams {
    pub fn new(gamma: f64, c_nu: f64, kernel: KernelSpec) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParams(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(c_nu.is_finite() && c_nu >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "c_nu must be nonnegative, got {c_nu}"
            )));
        }
        Ok(Self {
            gamma,
            c_nu,
            kernel,
        })
    }

    /// Exponential kernel with the given coefficients.
    pub fn exponential(gamma: f64, c_nu: f64) -> Result<Self> {
        Self::new(gamma, c_nu, KernelSpec::Exponential)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c_nu(&self) -> f64 {
        self.c_nu
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// Viscosity of the limiting viscous Burgers equation:
    /// `1/gamma + c_nu * M2 / 2`.
    pub fn effective_viscosity(&self) -> Result<f64> {
        let m = kernel_moments(&self.kernel)?;
        Ok(1.0 / self.gamma + self.c_nu * m.second / 2.0)
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            c_nu: DEFAULT_C_NU,
            kernel: KernelSpec::Exponential,
        }
    }
}

/// Largest `dt` with
/// `u0_max^2 dt/dx + (2/gamma) dt/dx^2 <= 1`.
pub fn cfl_max_dt(params: &PhysicalParams, grid: &GridSpec, u0_max: f64) -> f64 {
    let dx = grid.dx();
    1.0 / (u0_max * u0_max / dx + 2.0 / (params.gamma * dx * dx))
}

/// Largest `dt` for which the Burgers step is monotone:
/// `u_max dt/dx + (2/gamma) dt/dx^2 <= 1`. Coincides with [`cfl_max_dt`]
/// when `u_max = 1` and is the stricter of the two when `u_max < 1`.
pub fn monotone_max_dt(params: &PhysicalParams, grid: &GridSpec, u_max: f64) -> f64 {
    let dx = grid.dx();
    1.0 / (u_max / dx + 2.0 / (params.gamma * dx * dx))
}

/// Left-hand side of the stability condition; admissible when `<= 1`.
pub fn cfl_number(params: &PhysicalParams, grid: &GridSpec, u0_max: f64, dt: f64) -> f64 {
    let dx = grid.dx();
    u0_max * u0_max * dt / dx + 2.0 / params.gamma * dt / (dx * dx)
}

/// Relative slack allowed when checking a step against [`cfl_max_dt`], so
/// that the bound itself is admissible after rounding.
pub(crate) const CFL_SLACK: f64 = 1e-12;

pub(crate) fn check_cfl(
    params: &PhysicalParams,
    grid: &GridSpec,
    u_max: f64,
    dt: f64,
) -> Result<()> {
    let max_dt = cfl_max_dt(params, grid, u_max);
    if dt > max_dt * (1.0 + CFL_SLACK) {
        return Err(Error::Cfl { dt, max_dt });
    }
    Ok(())
}
