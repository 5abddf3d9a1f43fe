//! Lie-Trotter driver `Z^{n dt} = (X^dt Y^dt)^n`, the explicit reference
//! solver for the full equation and the time-step self-convergence study.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::convolution::convolve_into;
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::params::{cfl_max_dt, check_cfl, PhysicalParams};
use crate::report::StudyReport;
use crate::substeps::{boundary_is_small, burgers_update, CnRelaxation, MixedTerm};

/// Tolerance on `n_steps * dt` matching a requested horizon.
pub const HORIZON_TOL: f64 = 1e-12;

/// How the explicit reference solver balances the convolution against the
/// local `-u` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonlocalBalance {
    /// Subtract the rectangle rule's own kernel mass `sum_m dx K(m dx)`, so
    /// that the discrete nonlocal term has zero mass.
    #[default]
    DiscreteKernelMass,
    /// Subtract `u_j` itself. The discrete term then leaks mass at a rate
    /// proportional to `c_nu * dx`.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SchemeOptions {
    pub mixed_term: MixedTerm,
    pub balance: NonlocalBalance,
}

/// Which snapshots a run keeps. Step 0 and the final step are always kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recording {
    Every(usize),
    Steps(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSchedule {
    dt: f64,
    n_steps: usize,
    recording: Recording,
    half_steps: bool,
    options: SchemeOptions,
}

impl SplitSchedule {
    /// `n_steps` steps of size `dt`, with `dt` in `(0, 1)`.
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt < 1.0) {
            return Err(Error::Schedule(format!("dt must lie in (0, 1), got {dt}")));
        }
        Ok(Self {
            dt,
            n_steps,
            recording: Recording::Every(1),
            half_steps: false,
            options: SchemeOptions::default(),
        })
    }

    /// Steps of size `dt` up to `horizon`, which must be a whole number of
    /// steps.
    pub fn to_horizon(horizon: f64, dt: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::Schedule(format!(
                "horizon must be nonnegative, got {horizon}"
            )));
        }
        let n = (horizon / dt).round();
        if (n * dt - horizon).abs() > HORIZON_TOL * horizon.max(1.0) {
            return Err(Error::Schedule(format!(
                "horizon {horizon} is not a whole number of steps of size {dt}"
            )));
        }
        Self::new(dt, n as usize)
    }

    pub fn record_every(mut self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::Schedule("snapshot stride must be positive".into()));
        }
        self.recording = Recording::Every(stride);
        Ok(self)
    }

    /// Keep only the listed steps (plus the first and last).
    pub fn record_steps(mut self, mut steps: Vec<usize>) -> Self {
        steps.sort_unstable();
        steps.dedup();
        self.recording = Recording::Steps(steps);
        self
    }

    /// Also keep the intermediate states `Y^dt Z^{n dt} u0` for recorded `n`.
    pub fn with_half_steps(mut self) -> Self {
        self.half_steps = true;
        self
    }

    pub fn with_options(mut self, options: SchemeOptions) -> Self {
        self.options = options;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn horizon(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    pub fn options(&self) -> SchemeOptions {
        self.options
    }

    /// `t_n = n dt`.
    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    fn records(&self, step: usize) -> bool {
        if step == 0 || step == self.n_steps {
            return true;
        }
        match &self.recording {
            Recording::Every(k) => step.is_multiple_of(*k),
            Recording::Steps(s) => s.binary_search(&step).is_ok(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Engquist-Osher Burgers step followed by the Crank-Nicolson relaxation step.
    LieTrotter,
    /// Fully explicit scheme with a rectangle-rule convolution.
    ExplicitRectangle,
}

impl Scheme {
    pub fn tag(&self) -> &'static str {
        match self {
            Scheme::LieTrotter => "split-eo-cn",
            Scheme::ExplicitRectangle => "explicit-eo-rectangle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub scheme: Scheme,
    pub params: PhysicalParams,
    pub dt: f64,
    pub n_steps: usize,
    pub options: SchemeOptions,
}

impl RunMeta {
    /// Human-readable description of the discretization choices.
    pub fn describe(&self) -> String {
        match self.scheme {
            Scheme::LieTrotter => format!(
                "{} mixed_term={:?}",
                self.scheme.tag(),
                self.options.mixed_term
            ),
            Scheme::ExplicitRectangle => format!(
                "{} transport=centered balance={:?}",
                self.scheme.tag(),
                self.options.balance
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    snapshots: Vec<Snapshot>,
    half_steps: Vec<Snapshot>,
    meta: RunMeta,
}

impl Trajectory {
    /// Assembles a trajectory from externally produced snapshots. Times must
    /// increase strictly and all grids must agree.
    pub fn from_snapshots(snapshots: Vec<Snapshot>, meta: RunMeta) -> Result<Self> {
        if snapshots.windows(2).any(|w| w[1].time <= w[0].time) {
            return Err(Error::Domain(
                "snapshot times must increase strictly".into(),
            ));
        }
        if let Some(first) = snapshots.first() {
            if snapshots
                .iter()
                .any(|s| s.field.grid() != first.field.grid())
            {
                return Err(Error::GridMismatch);
            }
        }
        Ok(Self {
            snapshots,
            half_steps: Vec::new(),
            meta,
        })
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    /// States after the Burgers substep, at `t_{n+1/2}`.
    pub fn half_steps(&self) -> &[Snapshot] {
        &self.half_steps
    }

    pub fn meta(&self) -> &RunMeta {
        &self.meta
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("trajectory always holds the initial state")
    }

    pub fn first(&self) -> &Snapshot {
        &self.snapshots[0]
    }
}

struct Recorder<'a> {
    sched: &'a SplitSchedule,
    snapshots: Vec<Snapshot>,
    half_steps: Vec<Snapshot>,
    warned: bool,
}

impl<'a> Recorder<'a> {
    fn new(sched: &'a SplitSchedule, u0: &Field) -> Self {
        let mut r = Self {
            sched,
            snapshots: Vec::new(),
            half_steps: Vec::new(),
            warned: false,
        };
        r.push(0, u0.clone());
        r
    }

    fn push(&mut self, step: usize, field: Field) {
        if !self.warned && !boundary_is_small(field.values()) {
            log::warn!(
                "boundary values at t = {} are not negligible; enlarge the domain",
                self.sched.time(step)
            );
            self.warned = true;
        }
        self.snapshots.push(Snapshot {
            step,
            time: self.sched.time(step),
            field,
        });
    }

    fn push_half(&mut self, step: usize, field: Field) {
        self.half_steps.push(Snapshot {
            step,
            time: (step as f64 + 0.5) * self.sched.dt,
            field,
        });
    }
}

fn check_finite(values: &[f64], step: usize) -> Result<()> {
    match Field::first_non_finite(values) {
        Some(cell) => Err(Error::NonFinite { step, cell }),
        None => Ok(()),
    }
}

/// Lie-Trotter splitting: each step applies the Burgers substep and then
/// the Crank-Nicolson relaxation substep.
///
/// The stability condition is checked once against `max|u0|`.
pub fn split_evolve(
    u0: &Field,
    params: &PhysicalParams,
    sched: &SplitSchedule,
) -> Result<Trajectory> {
    let grid = *u0.grid();
    let dt = sched.dt;
    check_cfl(params, &grid, u0.max_abs(), dt)?;
    let relax = CnRelaxation::new(&grid, params, dt, sched.options.mixed_term)?;
    let dx = grid.dx();
    let gamma = params.gamma();

    let mut rec = Recorder::new(sched, u0);
    let mut cur = u0.values().to_vec();
    let mut half = vec![0.0; cur.len()];
    let mut next = vec![0.0; cur.len()];
    for n in 0..sched.n_steps {
        burgers_update(&cur, dx, gamma, dt, &mut half);
        relax.apply(&half, &mut next);
        check_finite(&next, n + 1)?;
        if sched.half_steps && sched.records(n) {
            rec.push_half(n, Field::from_raw(grid, half.clone()));
        }
        std::mem::swap(&mut cur, &mut next);
        if sched.records(n + 1) {
            rec.push(n + 1, Field::from_raw(grid, cur.clone()));
        }
    }
    Ok(Trajectory {
        snapshots: rec.snapshots,
        half_steps: rec.half_steps,
        meta: RunMeta {
            scheme: Scheme::LieTrotter,
            params: params.clone(),
            dt,
            n_steps: sched.n_steps,
            options: sched.options,
        },
    })
}

/// Fully explicit scheme for the whole equation:
/// `u^{n+1} = u^n - dt/dx (g_{j+1/2} - g_{j-1/2}) + dt/(gamma dx^2) D2 u
///          + c_nu dt [(K*u)_j - W u_j + (u_{j+1} - u_{j-1})/(2 dx)]`
/// with the rectangle-rule convolution. `W` is the discrete kernel mass or
/// one, depending on [`NonlocalBalance`].
///
/// Besides the Burgers stability bound the explicit nonlocal term needs
/// `c_nu dt <= 1`.
pub fn reference_abe_evolve(
    u0: &Field,
    params: &PhysicalParams,
    sched: &SplitSchedule,
) -> Result<Trajectory> {
    let grid = *u0.grid();
    let dt = sched.dt;
    check_cfl(params, &grid, u0.max_abs(), dt)?;
    let c = params.c_nu();
    if c * dt > 1.0 {
        return Err(Error::Cfl {
            dt,
            max_dt: cfl_max_dt(params, &grid, u0.max_abs()).min(1.0 / c),
        });
    }
    let dx = grid.dx();
    let gamma = params.gamma();
    let kernel = params.kernel();
    let balance = match sched.options.balance {
        NonlocalBalance::DiscreteKernelMass => kernel.discrete_mass(dx),
        NonlocalBalance::Unit => 1.0,
    };
    let half_dx = 0.5 / dx;

    let mut rec = Recorder::new(sched, u0);
    let mut cur = u0.values().to_vec();
    let n = cur.len();
    let mut conv = vec![0.0; n];
    let mut next = vec![0.0; n];
    for step in 0..sched.n_steps {
        burgers_update(&cur, dx, gamma, dt, &mut next);
        if c != 0.0 {
            convolve_into(kernel, dx, &cur, &mut conv);
            for j in 0..n {
                let ul = if j > 0 { cur[j - 1] } else { 0.0 };
                let ur = if j + 1 < n { cur[j + 1] } else { 0.0 };
                next[j] += c * dt * (conv[j] - balance * cur[j] + (ur - ul) * half_dx);
            }
        }
        check_finite(&next, step + 1)?;
        std::mem::swap(&mut cur, &mut next);
        if sched.records(step + 1) {
            rec.push(step + 1, Field::from_raw(grid, cur.clone()));
        }
    }
    Ok(Trajectory {
        snapshots: rec.snapshots,
        half_steps: Vec::new(),
        meta: RunMeta {
            scheme: Scheme::ExplicitRectangle,
            params: params.clone(),
            dt,
            n_steps: sched.n_steps,
            options: sched.options,
        },
    })
}

/// Result of [`self_convergence_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub dts: Vec<f64>,
    /// `||u_dt(T) - u_{dt/2}(T)||_2` for each `dt`.
    pub errors: Vec<f64>,
    /// Least-squares slope of `log e` against `log dt`; `None` when some
    /// error vanishes or fewer than two points are available.
    pub order: Option<f64>,
    pub report: StudyReport,
}

/// Least-squares slope of `log(errors)` against `log(dts)`.
pub fn fit_order(dts: &[f64], errors: &[f64]) -> Option<f64> {
    if dts.len() != errors.len() || dts.len() < 2 {
        return None;
    }
    if errors
        .iter()
        .chain(dts)
        .any(|v| !(v.is_finite() && *v > 0.0))
    {
        return None;
    }
    let xs: Vec<f64> = dts.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Builds the `(dt, error, observed_order)` table. The per-row order compares
/// each row with the previous one; the first row has none and carries NaN.
pub fn convergence_report(dts: &[f64], errors: &[f64]) -> StudyReport {
    let mut report = StudyReport::new(["dt", "error", "observed_order"]);
    for i in 0..dts.len() {
        let local = if i == 0 {
            f64::NAN
        } else {
            (errors[i - 1] / errors[i]).ln() / (dts[i - 1] / dts[i]).ln()
        };
        report
            .push_row(vec![dts[i], errors[i], local])
            .expect("three columns");
    }
    match fit_order(dts, errors) {
        Some(s) => report.set_meta("order", crate::report::format_number(s)),
        None => report.set_meta("order", "undefined"),
    }
    report
}

/// Time-step self-convergence at fixed grid: for each `dt` compare the split
/// solutions at `horizon` obtained with `dt` and `dt/2`.
pub fn self_convergence_study(
    u0: &Field,
    params: &PhysicalParams,
    horizon: f64,
    dt_list: &[f64],
    options: SchemeOptions,
) -> Result<ConvergenceStudy> {
    if dt_list.is_empty() {
        return Err(Error::Schedule("dt list is empty".into()));
    }
    if dt_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Schedule(
            "dt list must be strictly decreasing".into(),
        ));
    }
    let mut runs: BTreeMap<u64, f64> = BTreeMap::new();
    for &dt in dt_list {
        SplitSchedule::to_horizon(horizon, dt)?;
        runs.insert(dt.to_bits(), dt);
        runs.insert((dt / 2.0).to_bits(), dt / 2.0);
    }
    let finals: Vec<(u64, Field)> = runs
        .into_par_iter()
        .map(|(bits, dt)| {
            let sched = SplitSchedule::to_horizon(horizon, dt)?
                .record_steps(Vec::new())
                .with_options(options);
            let traj = split_evolve(u0, params, &sched)?;
            Ok((bits, traj.last().field.clone()))
        })
        .collect::<Result<_>>()?;
    let finals: BTreeMap<u64, Field> = finals.into_iter().collect();

    let mut errors = Vec::with_capacity(dt_list.len());
    for &dt in dt_list {
        let coarse = &finals[&dt.to_bits()];
        let fine = &finals[&(dt / 2.0).to_bits()];
        errors.push(coarse.difference(fine)?.norm(2.0)?);
    }
    let mut report = convergence_report(dt_list, &errors);
    report.set_meta("scheme", Scheme::LieTrotter.tag());
    report.set_meta("horizon", horizon);
    Ok(ConvergenceStudy {
        dts: dt_list.to_vec(),
        order: fit_order(dt_list, &errors),
        errors,
        report,
    })
}
