//! Initial data families used by the experiments.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

/// Gaussians are cut off where they drop below `exp(-36)`.
pub const GAUSSIAN_CUTOFF: f64 = 6.0;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// `amplitude * exp(-((x - center)/width)^2)` on `|x - center| < 6 width`.
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// `height` on `|x - center| < width / 2`.
    Box {
        center: f64,
        width: f64,
        height: f64,
    },
    /// Two boxes: `height` on `[center - width, center - width/4)` and
    /// `height / 2` on `[center + width/4, center + width)`.
    DoubleBox {
        center: f64,
        width: f64,
        height: f64,
    },
    /// Piecewise-linear through `(x, u)` samples, zero outside.
    Samples(Vec<(f64, f64)>),
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, w: f64| {
            if w > 0.0 && w.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive, got {w}")))
            }
        };
        match self {
            InitialData::Gaussian { width, .. } => positive("gaussian width", *width),
            InitialData::Box { width, .. } => positive("box width", *width),
            InitialData::DoubleBox { width, .. } => positive("double box width", *width),
            InitialData::Samples(s) => {
                if s.len() < 2 {
                    return Err(Error::Domain("need at least two samples".into()));
                }
                if s.iter().any(|(x, u)| !x.is_finite() || !u.is_finite()) {
                    return Err(Error::Domain("samples must be finite".into()));
                }
                if s.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Domain("sample abscissae must increase".into()));
                }
                Ok(())
            }
        }
    }

    /// Closed interval outside which the data vanish.
    pub fn support(&self) -> (f64, f64) {
        match self {
            InitialData::Gaussian { center, width, .. } => (
                center - GAUSSIAN_CUTOFF * width,
                center + GAUSSIAN_CUTOFF * width,
            ),
            InitialData::Box { center, width, .. } => (center - width / 2.0, center + width / 2.0),
            InitialData::DoubleBox { center, width, .. } => (center - width, center + width),
            InitialData::Samples(s) => (s[0].0, s[s.len() - 1].0),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            InitialData::Gaussian {
                center,
                width,
                amplitude,
            } => {
                let z = (x - center) / width;
                if z.abs() < GAUSSIAN_CUTOFF {
                    amplitude * (-z * z).exp()
                } else {
                    0.0
                }
            }
            InitialData::Box {
                center,
                width,
                height,
            } => {
                if (x - center).abs() < width / 2.0 {
                    height
                } else {
                    0.0
                }
            }
            InitialData::DoubleBox {
                center,
                width,
                height,
            } => {
                let d = x - center;
                if d >= -width && d < -width / 4.0 {
                    height
                } else if d >= width / 4.0 && d < width {
                    height / 2.0
                } else {
                    0.0
                }
            }
            InitialData::Samples(ref s) => {
                if x < s[0].0 || x > s[s.len() - 1].0 {
                    return 0.0;
                }
                let i = s
                    .partition_point(|p| p.0 <= x)
                    .saturating_sub(1)
                    .min(s.len() - 2);
                let (x0, u0) = s[i];
                let (x1, u1) = s[i + 1];
                let t = (x - x0) / (x1 - x0);
                (1.0 - t) * u0 + t * u1
            }
        }
    }

    pub fn sample(&self, grid: GridSpec) -> Result<Field> {
        self.validate()?;
        Field::from_fn(grid, |x| self.eval(x))
    }
}
