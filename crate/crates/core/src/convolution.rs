//! Rectangle-rule approximation of `K * f` on a uniform grid.
//!
//! `(K*f)_j = dx * sum_k K(x_j - x_k) f_k`, with `f` extended by zero outside
//! the grid. For the exponential kernel `K(0) = 0`, so the stencil is
//! strictly one sided and the sum obeys the recursion
//! `s_j = e^{-dx} (s_{j-1} + dx f_{j-1})`, which is what we evaluate.

use crate::grid::Field;
use crate::kernel::KernelSpec;

pub fn rectangle_convolution(k: &KernelSpec, f: &Field) -> Field {
    let mut out = vec![0.0; f.len()];
    convolve_into(k, f.grid().dx(), f.values(), &mut out);
    Field::from_raw(*f.grid(), out)
}

pub(crate) fn convolve_into(k: &KernelSpec, dx: f64, f: &[f64], out: &mut [f64]) {
    let n = f.len();
    debug_assert_eq!(out.len(), n);
    match k {
        KernelSpec::Exponential => {
            let decay = (-dx).exp();
            let mut s = 0.0;
            out[0] = 0.0;
            for j in 1..n {
                s = decay * (s + dx * f[j - 1]);
                out[j] = s;
            }
        }
        KernelSpec::Tabulated(_) => {
            let (m0, w) = k.rectangle_weights(dx, n);
            for (j, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (i, wm) in w.iter().enumerate() {
                    // x_j - x_k = m dx  =>  k = j - m
                    let kk = j as i64 - (m0 + i as i64);
                    if kk >= 0 && (kk as usize) < n {
                        acc += wm * f[kk as usize];
                    }
                }
                *o = acc;
            }
        }
    }
}
