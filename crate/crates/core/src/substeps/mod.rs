//! The two split flows and their building blocks.
//!
//! `Y^t` is the viscous Burgers flow `u_t = (u^2/2)_x + u_xx / gamma`, advanced
//! by an explicit Engquist-Osher finite-volume step. `X^t` is the relaxation
//! flow `v_t = c_nu (K*v - v + v_x)`; for the exponential kernel it is
//! equivalent to the local equation `v_t + v_tx = c_nu v_xx`, which we advance
//! with Crank-Nicolson and a tridiagonal solve. The exact flow of `X^t`,
//! computed spectrally, serves as an oracle.
//!
//! Boundaries are zero Dirichlet ghost cells; domains are expected to be
//! large enough that the solution stays negligible near them.

mod burgers;
mod relaxation;
mod spectral;
mod tridiag;

pub(crate) use burgers::burgers_update;
pub use burgers::{burgers_substep, eo_flux};
pub use relaxation::{cn_relaxation_substep, cn_relaxation_substep_with, CnRelaxation, MixedTerm};
pub use spectral::{relaxation_symbol, spectral_relaxation_exact, IMAG_RESIDUE_TOL};
pub use tridiag::{thomas_solve, TridiagonalSystem};

/// Relative size above which boundary values trigger a warning.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Whether both boundary cells are below `BOUNDARY_TOL * max|u|`.
pub fn boundary_is_small(values: &[f64]) -> bool {
    let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (first, last) = (values[0].abs(), values[values.len() - 1].abs());
    first <= BOUNDARY_TOL * m && last <= BOUNDARY_TOL * m
}

pub(crate) fn warn_if_boundary_large(values: &[f64], what: &str) {
    if !boundary_is_small(values) {
        log::warn!("{what}: boundary values are not negligible; enlarge the domain");
    }
}
