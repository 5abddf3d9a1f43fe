//! Large-time behavior: the source-type solution of viscous Burgers, scaled
//! distances to it, the parabolic rescaling and decay envelopes.

use crate::error::{Error, Result};
use crate::grid::{discrete_lp_norm, Field, GridSpec};
use crate::params::PhysicalParams;
use crate::report::StudyReport;
use crate::splitting::{Snapshot, Trajectory};

/// Largest `|M| / (2 nu)` the closed form evaluates without overflow.
pub const MAX_REYNOLDS: f64 = 700.0;

/// Source-type solution of `u_t = (u^2/2)_x + nu u_xx` with `u(0) = M delta_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSpec {
    pub mass: f64,
    pub viscosity: f64,
}

impl ProfileSpec {
    pub fn new(mass: f64, viscosity: f64) -> Result<Self> {
        if !(viscosity.is_finite() && viscosity > 0.0) {
            return Err(Error::Domain(format!(
                "viscosity must be positive, got {viscosity}"
            )));
        }
        if !mass.is_finite() {
            return Err(Error::Domain("mass must be finite".into()));
        }
        if (mass / (2.0 * viscosity)).abs() > MAX_REYNOLDS {
            return Err(Error::Domain(format!(
                "|M|/(2 nu) = {} exceeds {MAX_REYNOLDS}",
                (mass / (2.0 * viscosity)).abs()
            )));
        }
        Ok(Self { mass, viscosity })
    }

    /// Limit profile for the given equation: viscosity `1/gamma + c_nu M2/2`.
    pub fn for_params(params: &PhysicalParams, mass: f64) -> Result<Self> {
        Self::new(mass, params.effective_viscosity()?)
    }

    /// Normalization with unit coefficients, where the limit viscosity is
    /// `1 + M2/2 = 2`.
    pub fn unit_coefficients(mass: f64) -> Result<Self> {
        Self::new(mass, 2.0)
    }

    /// `u_M(t, x)` via Hopf-Cole: with `a = M/(2 nu)`, heat kernel `G` and
    /// `Phi = erfc(-x/sqrt(4 nu t))/2`,
    /// `u = 2 nu (e^a - 1) G / (1 + (e^a - 1) Phi)`.
    pub fn value(&self, t: f64, x: f64) -> f64 {
        let nu = self.viscosity;
        let a = self.mass / (2.0 * nu);
        if a == 0.0 {
            return 0.0;
        }
        let s = (4.0 * nu * t).sqrt();
        let z = x / s;
        let g = (-z * z).exp() / (s * std::f64::consts::PI.sqrt());
        let phi = 0.5 * libm::erfc(-z);
        let phi_c = 0.5 * libm::erfc(z);
        if a > 0.0 {
            2.0 * nu * (-(-a).exp_m1()) * g / ((-a).exp() * phi_c + phi)
        } else {
            2.0 * nu * a.exp_m1() * g / (phi_c + a.exp() * phi)
        }
    }
}

pub fn self_similar_profile(spec: &ProfileSpec, t: f64, grid: &GridSpec) -> Result<Field> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!(
            "profile time must be positive, got {t}"
        )));
    }
    Field::from_fn(*grid, |x| spec.value(t, x))
}

fn metric_label(p: f64) -> String {
    if p.is_infinite() {
        "scaled_Linf".into()
    } else {
        format!("scaled_L{p}")
    }
}

/// `t^{(1 - 1/p)/2} ||u(t) - u_M(t)||_p` at every snapshot with `t > 0`, one
/// column per exponent.
pub fn decay_metrics(traj: &Trajectory, spec: &ProfileSpec, ps: &[f64]) -> Result<StudyReport> {
    for &p in ps {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!(
                "norm exponent must be >= 1, got {p}"
            )));
        }
    }
    let mut report = StudyReport::new(
        std::iter::once("t".to_string()).chain(ps.iter().map(|&p| metric_label(p))),
    );
    report.set_meta("mass", spec.mass);
    report.set_meta("viscosity", spec.viscosity);
    for snap in traj.snapshots() {
        if snap.time <= 0.0 {
            log::info!("skipping snapshot at t = {}", snap.time);
            continue;
        }
        let profile = self_similar_profile(spec, snap.time, snap.field.grid())?;
        let diff = snap.field.difference(&profile)?;
        let mut row = vec![snap.time];
        for &p in ps {
            let rate = if p.is_infinite() {
                0.5
            } else {
                0.5 * (1.0 - 1.0 / p)
            };
            row.push(snap.time.powf(rate) * discrete_lp_norm(&diff, p)?);
        }
        report.push_row(row)?;
    }
    Ok(report)
}

pub fn decay_metric_series(traj: &Trajectory, spec: &ProfileSpec, p: f64) -> Result<StudyReport> {
    decay_metrics(traj, spec, &[p])
}

/// `u^lambda(x) = lambda f(lambda x)` on the grid scaled by `1/lambda`; the
/// values are multiplied, the nodes are mapped exactly.
pub fn rescale_field(f: &Field, lambda: f64) -> Result<Field> {
    let grid = f.grid().scaled(lambda)?;
    Ok(Field::from_raw(
        grid,
        f.values().iter().map(|v| lambda * v).collect(),
    ))
}

/// Rescaled snapshot: a state at time `t` becomes one at `t / lambda^2`.
pub fn rescale_snapshot(s: &Snapshot, lambda: f64) -> Result<Snapshot> {
    Ok(Snapshot {
        step: s.step,
        time: s.time / (lambda * lambda),
        field: rescale_field(&s.field, lambda)?,
    })
}

/// Outcome of [`decay_envelope_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeCheck {
    /// Columns `t`, `scaled_norm`, `running_max`.
    pub report: StudyReport,
    /// Running maximum at the end of the transient.
    pub fitted_constant: f64,
    pub violation: bool,
}

/// Fraction of the run treated as transient by [`decay_envelope_check`].
pub const ENVELOPE_TRANSIENT: f64 = 0.1;
/// Allowed growth of the running maximum after the transient.
pub const ENVELOPE_GROWTH: f64 = 0.05;

/// Tracks `||u(t)||_p (t + 1)^{(1 - 1/p)/2}`; a violation is flagged when its
/// running maximum ends more than 5% above its value at the end of the
/// transient (the first 10% of the run).
pub fn decay_envelope_check(traj: &Trajectory, p: f64) -> Result<EnvelopeCheck> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!(
            "norm exponent must be >= 1, got {p}"
        )));
    }
    let rate = if p.is_infinite() {
        0.5
    } else {
        0.5 * (1.0 - 1.0 / p)
    };
    let t_end = traj.last().time;
    let t_transient = ENVELOPE_TRANSIENT * t_end;
    let mut report = StudyReport::new(["t", "scaled_norm", "running_max"]);
    let mut running = 0.0f64;
    let mut fitted = None;
    for snap in traj.snapshots() {
        let v = discrete_lp_norm(&snap.field, p)? * (snap.time + 1.0).powf(rate);
        running = running.max(v);
        if fitted.is_none() && snap.time >= t_transient {
            fitted = Some(running);
        }
        report.push_row(vec![snap.time, v, running])?;
    }
    let fitted_constant = fitted.unwrap_or(running);
    let violation = running > (1.0 + ENVELOPE_GROWTH) * fitted_constant;
    report.set_meta(
        "fitted_constant",
        crate::report::format_number(fitted_constant),
    );
    report.set_meta("violation", violation);
    Ok(EnvelopeCheck {
        report,
        fitted_constant,
        violation,
    })
}
