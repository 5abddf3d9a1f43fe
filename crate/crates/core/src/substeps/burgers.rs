use crate::error::Result;
use crate::grid::Field;
use crate::params::{check_cfl, PhysicalParams};

/// Engquist-Osher flux for `f(u) = -u^2/2`:
/// `g(a, b) = -a (a - |a|)/4 - b (b + |b|)/4`.
#[inline]
pub fn eo_flux(a: f64, b: f64) -> f64 {
    -a * (a - a.abs()) / 4.0 - b * (b + b.abs()) / 4.0
}

/// One explicit step of the viscous Burgers flow:
/// Engquist-Osher convection plus centered diffusion, zero ghost cells.
///
/// Rejects `dt` above the stability bound for the current `max|u|`.
pub fn burgers_substep(u: &Field, params: &PhysicalParams, dt: f64) -> Result<Field> {
    check_cfl(params, u.grid(), u.max_abs(), dt)?;
    super::warn_if_boundary_large(u.values(), "burgers_substep");
    let mut out = vec![0.0; u.len()];
    burgers_update(u.values(), u.grid().dx(), params.gamma(), dt, &mut out);
    Ok(Field::from_raw(*u.grid(), out))
}

pub(crate) fn burgers_update(u: &[f64], dx: f64, gamma: f64, dt: f64, out: &mut [f64]) {
    let n = u.len();
    let lambda = dt / dx;
    let mu = dt / (gamma * dx * dx);
    let at = |j: isize| -> f64 {
        if j < 0 || j as usize >= n {
            0.0
        } else {
            u[j as usize]
        }
    };
    // flux through the left face of cell 0
    let mut left = eo_flux(0.0, u[0]);
    for j in 0..n {
        let uj = u[j];
        let ul = at(j as isize - 1);
        let ur = at(j as isize + 1);
        let right = eo_flux(uj, ur);
        out[j] = uj - lambda * (right - left) + mu * (ul - 2.0 * uj + ur);
        left = right;
    }
}
