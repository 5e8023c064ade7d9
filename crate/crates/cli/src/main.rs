//! `relbgk <experiment> --config <file> [--threads N] [--out DIR] [--override key=value]...`

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use log::{error, info, warn};
use relbgk::experiments::{self, ExperimentConfig, RunContext, EXIT_CONFIG, EXIT_IO};
use relbgk::grid::snapshot;
use relbgk::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ExperimentName {
    ValidateMoments,
    ValidateBessel,
    Relax,
    Evolve,
    LinearLab,
    DecayStudy,
}

impl ExperimentName {
    fn as_str(self) -> &'static str {
        match self {
            Self::ValidateMoments => "validate_moments",
            Self::ValidateBessel => "validate_bessel",
            Self::Relax => "relax",
            Self::Evolve => "evolve",
            Self::LinearLab => "linear_lab",
            Self::DecayStudy => "decay_study",
        }
    }
}

/// Runs one experiment and writes report.json (plus timeseries.csv for
/// time-dependent runs). Exit status: 0 pass, 2 failed checks,
/// 3 configuration error, 4 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "relbgk", version)]
struct Args {
    experiment: ExperimentName,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dotted key=value applied to the config before validation, e.g. grid.n_per_axis=16.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(args: &Args) -> Result<i32, (Error, i32)> {
    let fail = |e: Error| {
        let code = experiments::exit_code(&e);
        (e, code)
    };
    let cfg = ExperimentConfig::load(&args.config, &args.overrides).map_err(fail)?;
    if cfg.experiment.name() != args.experiment.as_str() {
        return Err((
            Error::Config(format!(
                "command asks for `{}` but the config describes `{}`",
                args.experiment.as_str(),
                cfg.experiment.name()
            )),
            EXIT_CONFIG,
        ));
    }
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| (Error::Config(format!("cannot set up {n} threads: {e}")), EXIT_CONFIG))?;
    }
    let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    info!("{} config {} -> {}", cfg.experiment.name(), cfg.hash(), out.display());

    let mut ctx = RunContext::with_snapshots(out.join("snapshots"));
    match experiments::run(&cfg, &mut ctx) {
        Ok(outcome) => {
            experiments::write_outputs(&outcome, &out).map_err(|e| (e, EXIT_IO))?;
            for c in &outcome.report.checks {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                println!("{verdict} {} = {:e} (bound {:e})", c.name, c.value, c.bound);
            }
            Ok(outcome.exit_code())
        }
        Err(failure) => {
            if let Some((field, t)) = &failure.last_valid {
                let path = out.join("last_valid.bin");
                match std::fs::create_dir_all(&out).map_err(Error::from).and_then(|_| snapshot::save(&path, field, *t)) {
                    Ok(()) => warn!("last valid state at t = {t} written to {}", path.display()),
                    Err(e) => warn!("could not write the last valid state: {e}"),
                }
            }
            Err(fail(failure.error))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RELBGK_LOG", "warn")).init();
    let args = Args::parse();
    let code = match run(&args) {
        Ok(code) => code,
        Err((e, code)) => {
            error!("{e}");
            eprintln!("relbgk: {e}");
            code
        }
    };
    ExitCode::from(code as u8)
}
