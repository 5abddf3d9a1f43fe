use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::params::PhysicalParams;

/// Largest imaginary residue, relative to the output max-norm, accepted
/// after the inverse transform.
pub const IMAG_RESIDUE_TOL: f64 = 1e-12;

/// Fourier multiplier of the exact relaxation flow,
/// `exp(-c_nu t xi^2 / (1 + i xi))`. Its modulus never exceeds one and it
/// equals one at `xi = 0`.
pub fn relaxation_symbol(xi: f64, c_nu_t: f64) -> Complex64 {
    let z = Complex64::new(-c_nu_t * xi * xi, 0.0) / Complex64::new(1.0, xi);
    z.exp()
}

/// Exact relaxation flow over time `t`, computed on the periodized grid.
///
/// The data must be compactly supported well inside the domain; otherwise
/// the exponential tail of the kernel wraps around.
pub fn spectral_relaxation_exact(u: &Field, params: &PhysicalParams, t: f64) -> Result<Field> {
    if !params.kernel().is_exponential() {
        return Err(Error::UnsupportedKernel(
            "the spectral flow is implemented for the exponential kernel".into(),
        ));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    let n = u.len();
    let length = u.grid().length();
    let ct = params.c_nu() * t;

    let mut buf: Vec<Complex64> = u.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (m, c) in buf.iter_mut().enumerate() {
        let k = if m <= n / 2 {
            m as f64
        } else {
            m as f64 - n as f64
        };
        let xi = 2.0 * std::f64::consts::PI * k / length;
        let mut s = relaxation_symbol(xi, ct);
        if n.is_multiple_of(2) && m == n / 2 {
            // the Nyquist mode has no conjugate partner
            s = Complex64::new(s.re, 0.0);
        }
        *c *= s;
    }
    planner.plan_fft_inverse(n).process(&mut buf);

    let scale = 1.0 / n as f64;
    let out: Vec<f64> = buf.iter().map(|c| c.re * scale).collect();
    let out_max = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let imag_max = buf.iter().fold(0.0f64, |m, c| m.max((c.im * scale).abs()));
    if imag_max > IMAG_RESIDUE_TOL * out_max.max(f64::MIN_POSITIVE) {
        return Err(Error::DomainTooSmall(format!(
            "imaginary residue {imag_max:e} against max-norm {out_max:e}"
        )));
    }
    super::warn_if_boundary_large(&out, "spectral_relaxation_exact");
    Field::new(*u.grid(), out)
}
