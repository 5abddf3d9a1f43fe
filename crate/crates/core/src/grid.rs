//! Uniform cell-centered grids, fields sampled on them and discrete norms.
//!
//! Cell `j` covers `[x_min + j dx, x_min + (j+1) dx)` and its node sits at the
//! cell center `x_min + (j + 1/2) dx`. All schemes in this crate are
//! translation invariant, so the choice of centering only shifts the node set.

use crate::error::{Error, Result};

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "x_min = {x_min} must be smaller than x_max = {x_max}"
            )));
        }
        if n_cells < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_CELLS} cells, got {n_cells}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_cells,
        })
    }

    /// Grid with a prescribed cell width; the interval length must be an
    /// integer multiple of `dx` (relative tolerance 1e-9).
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "cell width must be positive, got {dx}"
            )));
        }
        let cells = (x_max - x_min) / dx;
        let n = cells.round();
        if (cells - n).abs() > 1e-9 * cells.abs().max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "interval [{x_min}, {x_max}] is not a whole number of cells of width {dx}"
            )));
        }
        Self::new(x_min, x_max, n as usize)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    /// Cell-center position of cell `j`.
    pub fn node(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let dx = self.dx();
        (0..self.n_cells).map(move |j| self.x_min + (j as f64 + 0.5) * dx)
    }

    /// Same cell count on `[x_min / lambda, x_max / lambda]`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Domain(format!(
                "scale factor must be positive, got {lambda}"
            )));
        }
        Self::new(self.x_min / lambda, self.x_max / lambda, self.n_cells)
    }

    /// Grid shifted by a whole number of cells.
    pub fn shifted_cells(&self, cells: i64) -> Self {
        let offset = cells as f64 * self.dx();
        Self {
            x_min: self.x_min + offset,
            x_max: self.x_max + offset,
            n_cells: self.n_cells,
        }
    }
}

/// Cell values of the solution at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                grid.n_cells(),
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "value in cell {j} is not finite"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_cells()],
        }
    }

    /// Samples `f` at the cell centers.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    /// Builds a field from values already known to be finite.
    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_cells());
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Discrete mass `dx * sum(u_j)`.
    pub fn mass(&self) -> f64 {
        self.grid.dx() * self.values.iter().sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self, p: f64) -> Result<f64> {
        discrete_lp_norm(self, p)
    }

    pub fn scale(&self, c: f64) -> Field {
        Field::from_raw(self.grid, self.values.iter().map(|v| c * v).collect())
    }

    /// Pointwise difference; both fields must live on the same grid.
    pub fn difference(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Field::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    /// Same values on a grid shifted by `cells` whole cells.
    pub fn translated(&self, cells: i64) -> Field {
        Field::from_raw(self.grid.shifted_cells(cells), self.values.clone())
    }

    /// Index of the first non-finite cell, if any.
    pub(crate) fn first_non_finite(values: &[f64]) -> Option<usize> {
        values.iter().position(|v| !v.is_finite())
    }
}

/// `(dx * sum |f_j|^p)^(1/p)` for finite `p >= 1`, `max |f_j|` for `p = inf`.
pub fn discrete_lp_norm(f: &Field, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!(
            "norm exponent must be >= 1, got {p}"
        )));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let dx = f.grid.dx();
    if p == 1.0 {
        return Ok(dx * f.values.iter().map(|v| v.abs()).sum::<f64>());
    }
    if p == 2.0 {
        return Ok((dx * f.values.iter().map(|v| v * v).sum::<f64>()).sqrt());
    }
    // Scale by the max to keep |f|^p representable.
    let m = f.max_abs();
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = f.values.iter().map(|v| (v.abs() / m).powf(p)).sum();
    Ok(m * (dx * s).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_rejects_degenerate_input() {
        assert!(GridSpec::new(1.0, 1.0, 10).is_err());
        assert!(GridSpec::new(2.0, 1.0, 10).is_err());
        assert!(GridSpec::new(0.0, 1.0, 2).is_err());
        assert!(GridSpec::new(0.0, f64::INFINITY, 10).is_err());
        assert!(GridSpec::with_spacing(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn spacing_constructor_counts_cells() {
        let g = GridSpec::with_spacing(-50.0, 50.0, 0.1).unwrap();
        assert_eq!(g.n_cells(), 1000);
        assert!((g.dx() - 0.1).abs() < 1e-15);
        assert!((g.node(0) + 49.95).abs() < 1e-12);
    }

    #[test]
    fn field_rejects_wrong_length_and_nan() {
        let g = GridSpec::new(0.0, 1.0, 4).unwrap();
        assert!(Field::new(g, vec![0.0; 3]).is_err());
        assert!(Field::new(g, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn norm_examples() {
        let g = GridSpec::new(0.0, 1.0, 10).unwrap();
        assert_eq!(discrete_lp_norm(&Field::zeros(g), 2.0).unwrap(), 0.0);

        let ones = Field::new(g, vec![1.0; 10]).unwrap();
        assert!((discrete_lp_norm(&ones, 1.0).unwrap() - 1.0).abs() < 1e-15);

        let g = GridSpec::new(0.0, 0.75, 3).unwrap();
        let spike = Field::new(g, vec![0.0, 2.0, 0.0]).unwrap();
        assert!((discrete_lp_norm(&spike, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(discrete_lp_norm(&spike, f64::INFINITY).unwrap(), 2.0);
    }

    #[test]
    fn norm_rejects_small_exponent() {
        let g = GridSpec::new(0.0, 1.0, 4).unwrap();
        assert!(matches!(
            discrete_lp_norm(&Field::zeros(g), 0.5),
            Err(Error::Domain(_))
        ));
        assert!(discrete_lp_norm(&Field::zeros(g), f64::NAN).is_err());
    }

    #[test]
    fn general_exponent_matches_direct_formula() {
        let g = GridSpec::new(0.0, 1.0, 5).unwrap();
        let f = Field::new(g, vec![0.1, -0.4, 2.0, 0.3, 0.0]).unwrap();
        let direct =
            (0.2 * f.values().iter().map(|v| v.abs().powf(3.0)).sum::<f64>()).powf(1.0 / 3.0);
        assert!((discrete_lp_norm(&f, 3.0).unwrap() - direct).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn norm_is_homogeneous(
            values in proptest::collection::vec(-10.0f64..10.0, 3..40),
            c in -5.0f64..5.0,
            p in prop_oneof![Just(1.0), Just(2.0), Just(3.5), Just(f64::INFINITY)],
        ) {
            let g = GridSpec::new(0.0, 2.0, values.len()).unwrap();
            let f = Field::new(g, values).unwrap();
            let lhs = discrete_lp_norm(&f.scale(c), p).unwrap();
            let rhs = c.abs() * discrete_lp_norm(&f, p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }
    }
}
