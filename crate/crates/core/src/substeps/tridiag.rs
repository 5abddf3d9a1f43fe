use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the matrix max-row-sum are treated
/// as zero.
pub const PIVOT_TOL: f64 = 1e-14;

/// `A x = rhs` with `A` tridiagonal. `lower[i]` sits in row `i + 1`,
/// `upper[i]` in row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::Domain("empty tridiagonal system".into()));
        }
        if lower.len() != n - 1 || upper.len() != n - 1 || rhs.len() != n {
            return Err(Error::Domain(format!(
                "band lengths {}/{}/{} and rhs {} do not fit a system of size {n}",
                lower.len(),
                n,
                upper.len(),
                rhs.len()
            )));
        }
        Ok(Self {
            lower,
            diag,
            upper,
            rhs,
        })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// `max_i sum_j |A_ij|`.
    pub fn norm_inf(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|i| {
                let l = if i > 0 { self.lower[i - 1].abs() } else { 0.0 };
                let u = if i + 1 < n { self.upper[i].abs() } else { 0.0 };
                l + self.diag[i].abs() + u
            })
            .fold(0.0, f64::max)
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Thomas algorithm (Gaussian elimination without pivoting).
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    let factor = ThomasFactor::new(&sys.lower, &sys.diag, &sys.upper)?;
    let mut x = sys.rhs.clone();
    factor.solve_in_place(&mut x);
    Ok(x)
}

/// LU factors of a tridiagonal matrix, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub(crate) struct ThomasFactor {
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper_scaled: Vec<f64>,
}

impl ThomasFactor {
    pub(crate) fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        let scale = (0..n)
            .map(|i| {
                let l = if i > 0 { lower[i - 1].abs() } else { 0.0 };
                let u = if i + 1 < n { upper[i].abs() } else { 0.0 };
                l + diag[i].abs() + u
            })
            .fold(0.0, f64::max);
        let tol = PIVOT_TOL * scale;
        let mut inv_pivot = Vec::with_capacity(n);
        let mut upper_scaled = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let pivot = if i == 0 {
                diag[0]
            } else {
                diag[i] - lower[i - 1] * upper_scaled[i - 1]
            };
            if pivot.is_nan() || pivot.abs() <= tol {
                return Err(Error::Singular { row: i, pivot });
            }
            let inv = 1.0 / pivot;
            inv_pivot.push(inv);
            if i + 1 < n {
                upper_scaled.push(upper[i] * inv);
            }
        }
        Ok(Self {
            lower: lower.to_vec(),
            inv_pivot,
            upper_scaled,
        })
    }

    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        x[0] *= self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i - 1] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.upper_scaled[i] * x[i + 1];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with partial pivoting.
    pub(crate) fn dense_solve(sys: &TridiagonalSystem) -> Vec<f64> {
        let n = sys.size();
        let mut a = vec![vec![0.0; n + 1]; n];
        for i in 0..n {
            a[i][i] = sys.diag[i];
            if i > 0 {
                a[i][i - 1] = sys.lower[i - 1];
            }
            if i + 1 < n {
                a[i][i + 1] = sys.upper[i];
            }
            a[i][n] = sys.rhs[i];
        }
        for col in 0..n {
            let p = (col..n)
                .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
                .unwrap();
            a.swap(col, p);
            let (top, rest) = a.split_at_mut(col + 1);
            let pivot_row = &top[col];
            for row in rest {
                let f = row[col] / pivot_row[col];
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|c| a[i][c] * x[c]).sum();
            x[i] = (a[i][n] - s) / a[i][i];
        }
        x
    }

    #[test]
    fn identity() {
        let r = vec![1.0, -2.0, 3.5, 0.25];
        let sys =
            TridiagonalSystem::new(vec![0.0; 3], vec![1.0; 4], vec![0.0; 3], r.clone()).unwrap();
        assert_eq!(thomas_solve(&sys).unwrap(), r);
    }

    #[test]
    fn two_by_two() {
        let sys =
            TridiagonalSystem::new(vec![1.0], vec![2.0, 2.0], vec![1.0], vec![3.0, 3.0]).unwrap();
        let x = thomas_solve(&sys).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn size_one() {
        let sys = TridiagonalSystem::new(vec![], vec![4.0], vec![], vec![2.0]).unwrap();
        assert_eq!(thomas_solve(&sys).unwrap(), vec![0.5]);
    }

    #[test]
    fn inconsistent_bands_are_rejected() {
        assert!(
            TridiagonalSystem::new(vec![1.0; 2], vec![1.0; 2], vec![1.0], vec![0.0; 2]).is_err()
        );
        assert!(TridiagonalSystem::new(vec![], vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn zero_pivot_is_singular() {
        let sys =
            TridiagonalSystem::new(vec![1.0], vec![0.0, 1.0], vec![1.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            thomas_solve(&sys),
            Err(Error::Singular { row: 0, .. })
        ));
        // second pivot 1 - 1*1 = 0
        let sys =
            TridiagonalSystem::new(vec![1.0], vec![1.0, 1.0], vec![1.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            thomas_solve(&sys),
            Err(Error::Singular { row: 1, .. })
        ));
    }

    #[test]
    fn random_dominant_systems_match_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = 50;
            let lower: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
            let upper: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
            let diag: Vec<f64> = (0..n).map(|_| 2.0 + rng.random_range(0.0..3.0)).collect();
            let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let sys = TridiagonalSystem::new(lower, diag, upper, rhs).unwrap();
            let x = thomas_solve(&sys).unwrap();
            let y = dense_solve(&sys);
            for (a, b) in x.iter().zip(&y) {
                assert!((a - b).abs() < 1e-12);
            }
            let res = sys.apply(&x);
            let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (r, b) in res.iter().zip(&sys.rhs) {
                assert!((r - b).abs() <= 1e-10 * sys.norm_inf() * xmax);
            }
        }
    }
}
