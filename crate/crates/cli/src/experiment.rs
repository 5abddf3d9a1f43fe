use std::path::{Path, PathBuf};

use abers_core::substeps::boundary_is_small;
use abers_core::{
    burgers_substep, cn_relaxation_substep_with, decay_envelope_check, decay_metrics,
    monotone_max_dt, rectangle_convolution, reference_abe_evolve, self_convergence_study,
    self_similar_profile, spectral_relaxation_exact, split_evolve, Field, KernelSpec, ProfileSpec,
    SplitSchedule, StudyReport, Trajectory,
};

use crate::config::{Experiment, RunConfig, SchemeChoice};
use crate::output::{config_hash, emit_csv};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    /// False only when `verify` found a failing check.
    pub passed: bool,
    pub config_hash: String,
}

/// One line of the `verify` report.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

pub fn run_experiment(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary, CliError> {
    let hash = config_hash(cfg);
    let u0 = cfg.initial.sample(cfg.grid)?;
    let mut reports = match cfg.experiment {
        Experiment::Simulate => vec![("trajectory.csv", simulate(cfg, &u0)?)],
        Experiment::Converge => converge(cfg, &u0)?,
        Experiment::Asymptote => asymptote(cfg, &u0)?,
        Experiment::Verify => vec![("verify.csv", checks_report(&verify(cfg, &u0)?))],
    };
    let mut passed = true;
    let mut files = Vec::new();
    for (name, report) in &mut reports {
        report.set_meta("config_hash", &hash);
        report.set_meta("experiment", cfg.experiment.name());
        if *name == "verify.csv" {
            passed = report
                .column("pass")
                .unwrap_or_default()
                .iter()
                .all(|&p| p == 1.0);
        }
        let path = out_dir.join(name);
        emit_csv(report, &path)?;
        files.push(path);
    }
    Ok(RunSummary {
        files,
        passed,
        config_hash: hash,
    })
}

fn describe_params(report: &mut StudyReport, cfg: &RunConfig) {
    report.set_meta("gamma", cfg.params.gamma());
    report.set_meta("c_nu", cfg.params.c_nu());
    report.set_meta("dx", cfg.grid.dx());
    if report.meta("horizon").is_none() {
        report.set_meta("T", cfg.horizon);
    }
}

fn simulate(cfg: &RunConfig, u0: &Field) -> Result<StudyReport, CliError> {
    let mut sched = SplitSchedule::to_horizon(cfg.horizon, cfg.dt())?.with_options(cfg.options);
    sched = match cfg.record_every {
        Some(k) => sched.record_every(k)?,
        None => sched.record_steps(Vec::new()),
    };
    let traj = match cfg.scheme {
        SchemeChoice::Split => split_evolve(u0, &cfg.params, &sched)?,
        SchemeChoice::Reference => reference_abe_evolve(u0, &cfg.params, &sched)?,
    };
    let mut report = StudyReport::new(["t", "x", "u"]);
    for snap in traj.snapshots() {
        for (x, u) in cfg.grid.nodes().zip(snap.field.values()) {
            report.push_row(vec![snap.time, x, *u])?;
        }
    }
    describe_params(&mut report, cfg);
    report.set_meta("scheme", traj.meta().describe());
    report.set_meta("dt", cfg.dt());
    report.set_meta("n_steps", traj.meta().n_steps);
    Ok(report)
}

fn converge(cfg: &RunConfig, u0: &Field) -> Result<Vec<(&'static str, StudyReport)>, CliError> {
    let study = self_convergence_study(u0, &cfg.params, cfg.horizon, &cfg.dt_list, cfg.options)?;
    let mut report = study.report;
    describe_params(&mut report, cfg);
    report.set_meta("scheme", "split-eo-cn");
    let mut out = vec![("convergence.csv", report)];
    if cfg.compare_reference {
        out.push(("cross_solver.csv", cross_solver(cfg, u0)?));
    }
    Ok(out)
}

fn cross_solver(cfg: &RunConfig, u0: &Field) -> Result<StudyReport, CliError> {
    let mut report = StudyReport::new(["dt", "distance", "factor"]);
    let mut prev: Option<f64> = None;
    for &dt in &cfg.dt_list {
        let sched = SplitSchedule::to_horizon(cfg.horizon, dt)?
            .with_options(cfg.options)
            .record_steps(Vec::new());
        let (a, b) = rayon::join(
            || split_evolve(u0, &cfg.params, &sched),
            || reference_abe_evolve(u0, &cfg.params, &sched),
        );
        let d = a?.last().field.difference(&b?.last().field)?.norm(2.0)?;
        report.push_row(vec![dt, d, prev.map_or(f64::NAN, |p| p / d)])?;
        prev = Some(d);
    }
    describe_params(&mut report, cfg);
    Ok(report)
}

/// Steps closest to `count` log-spaced times between `max(dt, T/10^4)` and `T`.
pub fn log_spaced_steps(dt: f64, n_steps: usize, count: usize) -> Vec<usize> {
    let t_end = n_steps as f64 * dt;
    let t_min = dt.max(t_end * 1e-4);
    let mut steps: Vec<usize> = (0..count)
        .map(|k| {
            let t = t_min * (t_end / t_min).powf(k as f64 / (count - 1) as f64);
            ((t / dt).round() as usize).clamp(1, n_steps)
        })
        .collect();
    steps.dedup();
    steps
}

fn asymptote(cfg: &RunConfig, u0: &Field) -> Result<Vec<(&'static str, StudyReport)>, CliError> {
    let sched = SplitSchedule::to_horizon(cfg.horizon, cfg.dt())?.with_options(cfg.options);
    let steps = log_spaced_steps(cfg.dt(), sched.n_steps(), cfg.snapshots);
    let traj = split_evolve(u0, &cfg.params, &sched.record_steps(steps))?;
    let spec = ProfileSpec::for_params(&cfg.params, u0.mass())?;

    let mut metrics = decay_metrics(&traj, &spec, &cfg.p_list)?;
    describe_params(&mut metrics, cfg);
    metrics.set_meta("scheme", traj.meta().describe());
    for &p in &cfg.p_list {
        let env = decay_envelope_check(&traj, p)?;
        metrics.set_meta(format!("envelope_violation_p{p}"), env.violation);
    }

    let last = traj.last();
    let profile = self_similar_profile(&spec, last.time, &cfg.grid)?;
    let mut comparison = StudyReport::new(["x", "u", "u_M"]);
    for ((x, u), m) in cfg
        .grid
        .nodes()
        .zip(last.field.values())
        .zip(profile.values())
    {
        comparison.push_row(vec![x, *u, *m])?;
    }
    comparison.set_meta("t", last.time);
    comparison.set_meta("mass", spec.mass);
    comparison.set_meta("viscosity", spec.viscosity);
    Ok(vec![
        ("asymptote.csv", metrics),
        ("profile.csv", comparison),
    ])
}

pub const MASS_DRIFT_TOL: f64 = 1e-9;
pub const L2_GROWTH_TOL: f64 = 1e-12;
pub const SPIKE_TOL: f64 = 1e-14;
pub const CN_SPECTRAL_TOL: f64 = 1e-3;
pub const CROSS_SOLVER_TOL: f64 = 1e-2;

/// The invariant suite on the configured data, step by step.
pub fn verify(cfg: &RunConfig, u0: &Field) -> Result<Vec<Check>, CliError> {
    let p = &cfg.params;
    let dt = cfg.dt();
    let n = SplitSchedule::to_horizon(cfg.horizon, dt)?.n_steps();
    let single = SplitSchedule::new(dt, 1)?
        .with_options(cfg.options)
        .record_steps(Vec::new());
    let m0 = u0.mass();
    let scale = if m0 != 0.0 { m0.abs() } else { 1.0 };
    let norm0 = u0.norm(2.0)?.max(f64::MIN_POSITIVE);

    let mut u = u0.clone();
    let mut drift: f64 = 0.0;
    let mut growth = f64::NEG_INFINITY;
    let mut prev = u0.norm(2.0)?;
    for _ in 0..n {
        u = split_evolve(&u, p, &single)?.last().field.clone();
        drift = drift.max((u.mass() - m0).abs() / scale);
        let l2 = u.norm(2.0)?;
        growth = growth.max(l2 - prev);
        prev = l2;
    }

    let full = SplitSchedule::new(dt, n)?
        .with_options(cfg.options)
        .record_steps(Vec::new());
    let reference: Trajectory = reference_abe_evolve(u0, p, &full)?;
    let ref_drift = reference
        .snapshots()
        .iter()
        .map(|s| (s.field.mass() - m0).abs() / scale)
        .fold(0.0, f64::max);
    let cross = u.difference(&reference.last().field)?.norm(2.0)? / norm0;

    // the L-infinity bound needs the stricter monotone step when max|u| < 1
    let dt_mono = dt.min(monotone_max_dt(p, &cfg.grid, u0.max_abs()));
    let linf_growth = burgers_substep(u0, p, dt_mono)?.max_abs() - u0.max_abs();

    let cn = cn_relaxation_substep_with(u0, p, dt, cfg.options.mixed_term)?;
    let exact = spectral_relaxation_exact(u0, p, dt)?;
    let cn_gap = cn.difference(&exact)?.norm(2.0)? / norm0;

    let g = cfg.grid;
    let j0 = g.n_cells() / 2;
    let mut spike = vec![0.0; g.n_cells()];
    spike[j0] = 1.0;
    let conv = rectangle_convolution(&KernelSpec::Exponential, &Field::new(g, spike)?);
    let spike_err = conv
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let expect = if j > j0 {
                g.dx() * (-((j - j0) as f64) * g.dx()).exp()
            } else {
                0.0
            };
            (v - expect).abs()
        })
        .fold(0.0, f64::max);

    let boundary = if boundary_is_small(u.values()) {
        0.0
    } else {
        1.0
    };

    Ok(vec![
        Check {
            name: "split_mass_drift",
            value: drift,
            threshold: MASS_DRIFT_TOL,
        },
        Check {
            name: "split_l2_growth_per_step",
            value: growth,
            threshold: L2_GROWTH_TOL,
        },
        Check {
            name: "reference_mass_drift",
            value: ref_drift,
            threshold: MASS_DRIFT_TOL,
        },
        Check {
            name: "burgers_linf_growth",
            value: linf_growth,
            threshold: 0.0,
        },
        Check {
            name: "cn_vs_spectral_one_step",
            value: cn_gap,
            threshold: CN_SPECTRAL_TOL,
        },
        Check {
            name: "convolution_spike",
            value: spike_err,
            threshold: SPIKE_TOL,
        },
        Check {
            name: "split_vs_reference_at_T",
            value: cross,
            threshold: CROSS_SOLVER_TOL,
        },
        Check {
            name: "boundary_values_large",
            value: boundary,
            threshold: 0.0,
        },
    ])
}

/// Columns `check, value, threshold, pass`; `check` indexes the names
/// stored as `check.<i>` metadata.
pub fn checks_report(checks: &[Check]) -> StudyReport {
    let mut report = StudyReport::new(["check", "value", "threshold", "pass"]);
    for (i, c) in checks.iter().enumerate() {
        report
            .push_row(vec![
                i as f64,
                c.value,
                c.threshold,
                if c.passed() { 1.0 } else { 0.0 },
            ])
            .expect("four columns");
        report.set_meta(format!("check.{i}"), c.name);
    }
    report
}
