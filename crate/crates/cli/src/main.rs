use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use abers_cli::config::Experiment;
use abers_cli::output::{emit_meta, ensure_dir};
use abers_cli::{load_config, run_experiment, CliError, EXIT_CHECKS_FAILED};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Simulate,
    Converge,
    Asymptote,
    Verify,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Simulate => Experiment::Simulate,
            Command::Converge => Experiment::Converge,
            Command::Asymptote => Experiment::Asymptote,
            Command::Verify => Experiment::Verify,
        }
    }
}

/// Operator-splitting solver for the augmented Burgers equation.
#[derive(Debug, Parser)]
#[command(name = "abers", version)]
struct Args {
    #[arg(value_enum)]
    experiment: Command,
    /// Run configuration (flat key = value text).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the `output` key.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent runs.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: &Args) -> Result<bool, CliError> {
    let cfg = load_config(&args.config, Some(args.experiment.into()))?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&out)?;
    let start = Instant::now();
    let summary = run_experiment(&cfg, &out)?;
    let wall = start.elapsed().as_secs_f64();
    let files: Vec<String> = summary
        .files
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    emit_meta(
        &out.join("run.meta"),
        &[
            ("experiment", cfg.experiment.name().to_string()),
            ("config_hash", summary.config_hash.clone()),
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("threads", rayon::current_num_threads().to_string()),
            ("wall_time_s", format!("{wall:.3}")),
            ("files", files.join(",")),
        ],
    )?;
    for f in &files {
        println!("wrote {f}");
    }
    Ok(summary.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verify: some checks failed, see verify.csv");
            ExitCode::from(EXIT_CHECKS_FAILED)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Solver(s) = &e {
                if let Some(step) = s.step() {
                    eprintln!("failing step: {step}");
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
