//! `irs-secopt`: single runs, Monte-Carlo sweeps and the oracle self-test.
//!
//! Exit codes: 0 success, 1 self-test failure, 2 configuration or I/O
//! error, 3 numerical failure.

mod config;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use irs_secopt::bench::{
    emit_csv, emit_plot, monte_carlo_sweep, theta_stream, to_csv_string, Axis, Scheme, SweepConfig,
};
use irs_secopt::selftest::{run_selftest, Scale};
use irs_secopt::{optimize, scenario_channels, Error};

use crate::config::Config;
use crate::manifest::RunManifest;

#[derive(Parser)]
#[command(
    name = "irs-secopt",
    version,
    about = "Secrecy-rate optimization for IRS-assisted MIMO wiretap links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config file; built-in scenario defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the JSON run manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one channel realization and print a summary.
    Run {
        #[command(flatten)]
        common: Common,
        /// Phase alphabet size; 0 for continuous phases.
        #[arg(long)]
        q_levels: Option<usize>,
        /// Realization index of the channel draw.
        #[arg(long, default_value_t = 0)]
        realization: u64,
    },
    /// Average every scheme over paired realizations along one axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// p_max, m_elements or n_r.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated ascending axis values.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long)]
        realizations: Option<usize>,
        /// CSV destination; printed to stdout when omitted.
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, env = "IRS_SECOPT_WORKERS")]
        workers: Option<usize>,
        /// Scheme to include (repeatable): no_irs, random_irs, ao_continuous, ao_q<N>.
        #[arg(long = "scheme")]
        schemes: Vec<String>,
    },
    /// Cross-check the solvers against brute-force oracles.
    Selftest {
        #[arg(long, default_value = "quick")]
        scale: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Numerical(String),
    Selftest,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Selftest => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(m) | Failure::Numerical(m) => m.clone(),
            Failure::Selftest => "self-test failed".into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::BadLevelCount(_) | Error::Io(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn load_config(common: &Common) -> Result<Config, Failure> {
    let mut cfg = match &common.config {
        Some(path) => Config::load(path).map_err(Failure::Config)?,
        None => Config::default(),
    };
    if let Some(seed) = common.seed {
        cfg.scenario.master_seed = seed;
    }
    Ok(cfg)
}

fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<(), Failure> {
    manifest
        .write(path)
        .map_err(|e| Failure::Config(format!("cannot write manifest {}: {e}", path.display())))
}

/// Records the seed, runs `body`, then records the outcome.
fn with_manifest<T>(
    command: &str,
    cfg: &Config,
    seed: u64,
    path: &Path,
    body: impl FnOnce(&mut RunManifest) -> Result<T, Failure>,
) -> Result<T, Failure> {
    let mut manifest = RunManifest::start(command, seed, cfg);
    write_manifest(&manifest, path)?;
    let out = body(&mut manifest);
    manifest.finish(out.as_ref().map(|_| ()).map_err(Failure::message));
    write_manifest(&manifest, path)?;
    out
}

fn cmd_run(common: Common, q_levels: Option<usize>, realization: u64) -> Result<(), Failure> {
    let mut cfg = load_config(&common)?;
    if let Some(q) = q_levels {
        cfg.optimizer.q_levels = q;
    }
    cfg.validate().map_err(Failure::Config)?;
    let path = common
        .manifest
        .unwrap_or_else(|| PathBuf::from("irs-secopt-run.manifest.json"));
    let seed = cfg.scenario.master_seed;
    with_manifest("run", &cfg, seed, &path, |_| {
        let chs = scenario_channels(&cfg.scenario, realization)?;
        let mut rng = theta_stream(seed, realization);
        let report = optimize(&chs, cfg.scenario.p_max, &cfg.optimizer, &mut rng)?;
        println!("secrecy_rate_bps_hz = {}", report.secrecy_rate_clamped);
        println!("rounds = {}", report.rounds);
        println!("converged = {}", report.converged);
        println!("q_levels = {}", report.q_levels);
        println!("tx_power_w = {}", report.final_q.trace());
        println!("wall_time_s = {:.3}", report.wall_time);
        Ok(())
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    common: Common,
    axis: Option<String>,
    values: Option<Vec<f64>>,
    realizations: Option<usize>,
    out_csv: Option<PathBuf>,
    out_svg: Option<PathBuf>,
    workers: Option<usize>,
    schemes: Vec<String>,
) -> Result<(), Failure> {
    let mut cfg = load_config(&common)?;
    if let Some(a) = axis {
        cfg.sweep.axis = Some(a.parse::<Axis>()?);
    }
    if values.is_some() {
        cfg.sweep.values = values;
    }
    if let Some(n) = realizations {
        cfg.sweep.realizations = n;
    }
    if let Some(w) = workers {
        cfg.sweep.workers = w;
    }
    if !schemes.is_empty() {
        cfg.sweep.schemes = schemes
            .iter()
            .map(|s| s.parse::<Scheme>())
            .collect::<Result<_, _>>()?;
    }
    cfg.validate().map_err(Failure::Config)?;
    let axis = cfg
        .sweep
        .axis
        .ok_or_else(|| Failure::Config("sweep needs an axis (--axis or [sweep] axis)".into()))?;
    let values = cfg.sweep.values.clone().ok_or_else(|| {
        Failure::Config("sweep needs axis values (--values or [sweep] values)".into())
    })?;
    let path = common.manifest.unwrap_or_else(|| match &out_csv {
        Some(csv) => {
            let mut p = csv.clone().into_os_string();
            p.push(".manifest.json");
            PathBuf::from(p)
        }
        None => PathBuf::from("irs-secopt-sweep.manifest.json"),
    });
    let seed = cfg.scenario.master_seed;
    with_manifest("sweep", &cfg, seed, &path, |manifest| {
        let sweep_cfg = SweepConfig {
            scenario: cfg.scenario.clone(),
            optimizer: cfg.optimizer,
            schemes: cfg.sweep.schemes.clone(),
            workers: cfg.sweep.workers,
        };
        let start = Instant::now();
        let result = monte_carlo_sweep(&sweep_cfg, axis, &values, cfg.sweep.realizations)?;
        match &out_csv {
            Some(p) => {
                emit_csv(&result, p)?;
                manifest.outputs.push(p.clone());
            }
            None => print!("{}", to_csv_string(&result)),
        }
        if let Some(p) = &out_svg {
            emit_plot(&result, p)?;
            manifest.outputs.push(p.clone());
        }
        eprintln!(
            "{} points x {} realizations in {:.1} s",
            values.len(),
            cfg.sweep.realizations,
            start.elapsed().as_secs_f64()
        );
        Ok(())
    })
}

fn cmd_selftest(scale: &str, seed: u64, manifest: Option<PathBuf>) -> Result<(), Failure> {
    let scale: Scale = scale.parse()?;
    let path = manifest.unwrap_or_else(|| PathBuf::from("irs-secopt-selftest.manifest.json"));
    let mut cfg = Config::default();
    cfg.scenario.master_seed = seed;
    with_manifest("selftest", &cfg, seed, &path, |_| {
        let start = Instant::now();
        let report = run_selftest(scale, seed);
        for suite in &report.suites {
            let mark = if suite.all_passed() { "ok" } else { "FAIL" };
            println!(
                "{:<24} {:>5}/{:<5} {mark}",
                suite.name,
                suite.passed(),
                suite.total()
            );
        }
        println!(
            "{scale} self-test finished in {:.1} s",
            start.elapsed().as_secs_f64()
        );
        if report.all_passed() {
            Ok(())
        } else {
            Err(Failure::Selftest)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            common,
            q_levels,
            realization,
        } => cmd_run(common, q_levels, realization),
        Command::Sweep {
            common,
            axis,
            values,
            realizations,
            out_csv,
            out_svg,
            workers,
            schemes,
        } => cmd_sweep(
            common,
            axis,
            values,
            realizations,
            out_csv,
            out_svg,
            workers,
            schemes,
        ),
        Command::Selftest {
            scale,
            seed,
            manifest,
        } => cmd_selftest(&scale, seed, manifest),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !matches!(f, Failure::Selftest) {
                eprintln!("error: {}", f.message());
            }
            ExitCode::from(f.code())
        }
    }
}
