use super::tridiag::ThomasFactor;
use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::params::PhysicalParams;

/// Discretization of the mixed derivative `v_tx` in the Crank-Nicolson step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixedTerm {
    /// Centered difference `(w_{j+1} - w_{j-1}) / (2 dx)`.
    #[default]
    Centered,
    /// Same stencil divided by `dx` only, for comparison runs. It is
    /// consistent with `v_t + 2 v_tx = c_nu v_xx` instead.
    Literal,
}

/// Crank-Nicolson step for `v_t + v_tx = c_nu v_xx` with zero ghosts.
///
/// With `w` the new and `v` the old level, row `j` reads
/// `w_j - v_j + a (dw_{j+1} - dw_{j-1}) = r (D2 w + D2 v)_j`,
/// `dw = w - v`, `a = 1/(2 dx)`, `r = c_nu dt / (2 dx^2)`. The matrix only
/// depends on `(dx, c_nu, dt)`, so it is factored once and reused.
#[derive(Debug, Clone)]
pub struct CnRelaxation {
    a: f64,
    r: f64,
    n: usize,
    factor: ThomasFactor,
}

impl CnRelaxation {
    pub fn new(
        grid: &GridSpec,
        params: &PhysicalParams,
        dt: f64,
        mixed: MixedTerm,
    ) -> Result<Self> {
        if !params.kernel().is_exponential() {
            return Err(Error::UnsupportedKernel(
                "the local Crank-Nicolson form exists only for the exponential kernel".into(),
            ));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let dx = grid.dx();
        let a = match mixed {
            MixedTerm::Centered => 1.0 / (2.0 * dx),
            MixedTerm::Literal => 1.0 / dx,
        };
        let r = params.c_nu() * dt / (2.0 * dx * dx);
        let n = grid.n_cells();
        let lower = vec![-a - r; n - 1];
        let diag = vec![1.0 + 2.0 * r; n];
        let upper = vec![a - r; n - 1];
        let factor = ThomasFactor::new(&lower, &diag, &upper)?;
        Ok(Self { a, r, n, factor })
    }

    /// Advances `v` into `out`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(v.len(), n);
        let (a, r) = (self.a, self.r);
        for j in 0..n {
            let vl = if j > 0 { v[j - 1] } else { 0.0 };
            let vr = if j + 1 < n { v[j + 1] } else { 0.0 };
            out[j] = v[j] + a * (vr - vl) + r * (vl - 2.0 * v[j] + vr);
        }
        self.factor.solve_in_place(out);
    }
}

/// One Crank-Nicolson step of the relaxation flow over `dt`.
pub fn cn_relaxation_substep(u: &Field, params: &PhysicalParams, dt: f64) -> Result<Field> {
    cn_relaxation_substep_with(u, params, dt, MixedTerm::Centered)
}

pub fn cn_relaxation_substep_with(
    u: &Field,
    params: &PhysicalParams,
    dt: f64,
    mixed: MixedTerm,
) -> Result<Field> {
    super::warn_if_boundary_large(u.values(), "cn_relaxation_substep");
    let step = CnRelaxation::new(u.grid(), params, dt, mixed)?;
    let mut out = vec![0.0; u.len()];
    step.apply(u.values(), &mut out);
    Ok(Field::from_raw(*u.grid(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;

    fn gaussian(grid: GridSpec, width: f64) -> Field {
        Field::from_fn(grid, |x| (-(x / width).powi(2)).exp()).unwrap()
    }

    #[test]
    fn constant_is_preserved_in_the_interior() {
        // boundary layers decay by roughly e^{-1} per unit length
        let g = GridSpec::new(0.0, 200.0, 2000).unwrap();
        let u = Field::new(g, vec![0.7; 2000]).unwrap();
        let out = cn_relaxation_substep(&u, &PhysicalParams::default(), 0.05).unwrap();
        for v in &out.values()[800..1200] {
            assert!((v - 0.7).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn mass_is_conserved() {
        let g = GridSpec::new(-40.0, 40.0, 800).unwrap();
        let u = gaussian(g, 1.0);
        let p = PhysicalParams::exponential(100.0, 0.5).unwrap();
        let out = cn_relaxation_substep(&u, &p, 0.2).unwrap();
        assert!((out.mass() - u.mass()).abs() < 1e-12);
    }

    #[test]
    fn zero_dispersion_is_identity() {
        let g = GridSpec::new(-10.0, 10.0, 200).unwrap();
        let u = gaussian(g, 1.0);
        let p = PhysicalParams::exponential(100.0, 0.0).unwrap();
        let out = cn_relaxation_substep(&u, &p, 0.3).unwrap();
        for (a, b) in out.values().iter().zip(u.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn l2_norm_does_not_grow() {
        let g = GridSpec::new(-30.0, 30.0, 600).unwrap();
        let u = Field::from_fn(g, |x| if x.abs() < 2.0 { (x * 3.0).sin() } else { 0.0 }).unwrap();
        let p = PhysicalParams::exponential(100.0, 0.3).unwrap();
        let out = cn_relaxation_substep(&u, &p, 0.5).unwrap();
        assert!(out.norm(2.0).unwrap() <= u.norm(2.0).unwrap());
    }

    #[test]
    fn shift_equivariance() {
        let g = GridSpec::new(-30.0, 30.0, 600).unwrap();
        let u = gaussian(g, 1.0);
        let p = PhysicalParams::default();
        let base = cn_relaxation_substep(&u, &p, 0.1).unwrap();
        let mut shifted = vec![0.0; 600];
        shifted[25..].copy_from_slice(&u.values()[..575]);
        let out = cn_relaxation_substep(&Field::new(g, shifted).unwrap(), &p, 0.1).unwrap();
        for j in 100..500 {
            assert!((out.values()[j] - base.values()[j - 25]).abs() < 1e-13);
        }
    }

    #[test]
    fn tabulated_kernel_is_rejected() {
        let z: Vec<f64> = (0..=40000).map(|i| i as f64 * 1e-3).collect();
        let v = z.iter().map(|z| (-z).exp()).collect();
        let p = PhysicalParams::new(100.0, 0.02, KernelSpec::tabulated(z, v).unwrap()).unwrap();
        let g = GridSpec::new(0.0, 1.0, 10).unwrap();
        assert!(matches!(
            cn_relaxation_substep(&Field::zeros(g), &p, 0.1),
            Err(Error::UnsupportedKernel(_))
        ));
    }
}
