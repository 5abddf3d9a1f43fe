//! Relaxation memory kernels.

use crate::error::{Error, Result};

/// Tolerance on the unit mass and unit first moment of tabulated kernels.
/// Composite trapezoid quadrature of a sampled kernel cannot do better than
/// its own discretization error, so this is looser than the analytic path.
pub const TABULATED_MOMENT_TOL: f64 = 1e-6;

/// Memory kernel `K` of the nonlocal relaxation term.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `K(z) = exp(-z)` for `z > 0`, zero otherwise.
    Exponential,
    /// Piecewise-linear kernel through the given samples, zero outside them.
    Tabulated(TabulatedKernel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedKernel {
    abscissae: Vec<f64>,
    values: Vec<f64>,
}

/// Zeroth, first and second moments of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMoments {
    pub mass: f64,
    pub first: f64,
    pub second: f64,
}

impl KernelSpec {
    /// Validates a sampled kernel: at least two strictly increasing finite
    /// abscissae, finite nonnegative values, unit mass and first moment.
    pub fn tabulated(abscissae: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::Kernel(format!(
                "{} abscissae but {} values",
                abscissae.len(),
                values.len()
            )));
        }
        if abscissae.len() < 2 {
            return Err(Error::Kernel("need at least two samples".into()));
        }
        if abscissae.iter().any(|z| !z.is_finite()) {
            return Err(Error::Kernel("abscissae must be finite".into()));
        }
        if abscissae.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Kernel(
                "abscissae must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Kernel(
                "kernel is not integrable: non-finite sample".into(),
            ));
        }
        if values.iter().any(|v| *v < 0.0) {
            return Err(Error::Kernel("kernel samples must be nonnegative".into()));
        }
        let kernel = KernelSpec::Tabulated(TabulatedKernel { abscissae, values });
        let m = kernel_moments(&kernel)?;
        if (m.mass - 1.0).abs() > TABULATED_MOMENT_TOL
            || (m.first - 1.0).abs() > TABULATED_MOMENT_TOL
        {
            return Err(Error::Kernel(format!(
                "mass and first moment must equal one, got {} and {}",
                m.mass, m.first
            )));
        }
        Ok(kernel)
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self, KernelSpec::Exponential)
    }

    /// Rectangle-rule weights `dx * K(m dx)`: returns the first offset `m0`
    /// and the weights for `m0, m0 + 1, ...`. Only meaningful for
    /// tabulated kernels, whose support is bounded.
    pub(crate) fn rectangle_weights(&self, dx: f64, max_offset: usize) -> (i64, Vec<f64>) {
        match self {
            KernelSpec::Exponential => {
                let w = (1..=max_offset)
                    .map(|m| dx * (-(m as f64) * dx).exp())
                    .collect();
                (1, w)
            }
            KernelSpec::Tabulated(t) => {
                let lo = (t.abscissae[0] / dx).ceil() as i64;
                let hi = (t.abscissae[t.abscissae.len() - 1] / dx).floor() as i64;
                let hi = hi.min(max_offset as i64);
                let lo = lo.max(-(max_offset as i64));
                if hi < lo {
                    return (0, Vec::new());
                }
                let w = (lo..=hi)
                    .map(|m| dx * kernel_eval(self, m as f64 * dx))
                    .collect();
                (lo, w)
            }
        }
    }

    /// Sum of the rectangle-rule weights over all offsets.
    pub fn discrete_mass(&self, dx: f64) -> f64 {
        match self {
            // sum_{m >= 1} dx e^{-m dx}
            KernelSpec::Exponential => dx / dx.exp_m1(),
            KernelSpec::Tabulated(_) => self.rectangle_weights(dx, usize::MAX >> 2).1.iter().sum(),
        }
    }
}

/// `K(z)`. The exponential kernel is the indicator of the open half-line,
/// so `K(0) = 0`.
pub fn kernel_eval(k: &KernelSpec, z: f64) -> f64 {
    match k {
        KernelSpec::Exponential => {
            if z > 0.0 {
                (-z).exp()
            } else {
                0.0
            }
        }
        KernelSpec::Tabulated(t) => t.eval(z),
    }
}

/// Mass, first and second moment of the kernel. Analytic for the
/// exponential kernel, composite trapezoid for tabulated ones.
pub fn kernel_moments(k: &KernelSpec) -> Result<KernelMoments> {
    match k {
        KernelSpec::Exponential => Ok(KernelMoments {
            mass: 1.0,
            first: 1.0,
            second: 2.0,
        }),
        KernelSpec::Tabulated(t) => {
            let mut m = [0.0f64; 3];
            for (zs, ks) in t.abscissae.windows(2).zip(t.values.windows(2)) {
                let h = zs[1] - zs[0];
                for (p, acc) in m.iter_mut().enumerate() {
                    let f0 = ks[0] * zs[0].powi(p as i32);
                    let f1 = ks[1] * zs[1].powi(p as i32);
                    *acc += 0.5 * h * (f0 + f1);
                }
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::Kernel("kernel moments are not finite".into()));
            }
            Ok(KernelMoments {
                mass: m[0],
                first: m[1],
                second: m[2],
            })
        }
    }
}

impl TabulatedKernel {
    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[cfg(test)]
    pub(crate) fn for_tests(abscissae: Vec<f64>, values: Vec<f64>) -> Self {
        Self { abscissae, values }
    }

    fn eval(&self, z: f64) -> f64 {
        let zs = &self.abscissae;
        if z < zs[0] || z > zs[zs.len() - 1] {
            return 0.0;
        }
        let i = zs
            .partition_point(|&a| a <= z)
            .saturating_sub(1)
            .min(zs.len() - 2);
        let s = (z - zs[i]) / (zs[i + 1] - zs[i]);
        (1.0 - s) * self.values[i] + s * self.values[i + 1]
    }
}
