//! Comparison schemes and the Monte-Carlo sweep harness.
//!
//! Every realization index maps to one channel draw that all schemes share,
//! and the random starting phases are drawn from a stream keyed by the same
//! index. The random-phase baseline therefore evaluates exactly the start
//! point of the alternating optimizer, and the discrete-phase schemes reuse
//! the continuous run they are projected from.

mod csv;
mod svg;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use self::csv::{emit_csv, parse_csv, to_csv_string, CsvRow};
pub use self::svg::{emit_plot, to_svg_string, Y_LABEL};

use crate::alternating::{ao_optimize, apply_projection, AoOptions, OptimizerReport};
use crate::channel::{
    effective_channels, scenario_channels, ChannelSet, EffectiveChannels, ReflectVector,
    ScenarioConfig,
};
use crate::error::{Error, Result};
use crate::secrecy::{secrecy_rate_effective, TxCovariance};
use crate::streams::{stream, tag, Stream};
use crate::txcov::sca_optimize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Covariance design over the direct links only.
    NoIrs,
    /// Covariance design at uniformly random IRS phases.
    RandomIrs,
    /// Alternating optimization with continuous phases.
    AoContinuous,
    /// Alternating optimization projected onto a `q`-ary phase alphabet.
    AoDiscrete(usize),
}

impl Scheme {
    /// Baselines, the continuous optimizer and two phase alphabets.
    pub const STANDARD: [Scheme; 5] = [
        Scheme::NoIrs,
        Scheme::RandomIrs,
        Scheme::AoContinuous,
        Scheme::AoDiscrete(8),
        Scheme::AoDiscrete(2),
    ];

    pub fn name(&self) -> String {
        match self {
            Scheme::NoIrs => "no_irs".into(),
            Scheme::RandomIrs => "random_irs".into(),
            Scheme::AoContinuous => "ao_continuous".into(),
            Scheme::AoDiscrete(q) => format!("ao_q{q}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Scheme::AoDiscrete(q) if q < 2 => Err(Error::BadLevelCount(q)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let scheme = match s {
            "no_irs" => Scheme::NoIrs,
            "random_irs" => Scheme::RandomIrs,
            "ao_continuous" => Scheme::AoContinuous,
            other => {
                let q = other
                    .strip_prefix("ao_q")
                    .and_then(|q| q.parse().ok())
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown scheme {other:?}")))?;
                Scheme::AoDiscrete(q)
            }
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

impl Serialize for Scheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Swept scenario parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Transmit power budget in watts.
    PMax,
    /// Number of IRS elements.
    MElements,
    /// Number of legitimate receive antennas.
    NR,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::PMax => "p_max",
            Axis::MElements => "m_elements",
            Axis::NR => "n_r",
        }
    }

    /// Axis title used in plots.
    pub fn label(&self) -> &'static str {
        match self {
            Axis::PMax => "p_max (W)",
            Axis::MElements => "m_elements",
            Axis::NR => "n_r",
        }
    }

    /// The scenario at one point of the axis.
    pub fn apply(&self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let count = || {
            if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(Error::InvalidConfig(format!(
                    "{} needs a positive integer, got {value}",
                    self.name()
                )))
            }
        };
        let mut cfg = base.clone();
        match self {
            Axis::PMax => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "p_max must be positive, got {value}"
                    )));
                }
                cfg.p_max = value;
            }
            Axis::MElements => cfg.m = count()?,
            Axis::NR => cfg.n_r = count()?,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p_max" => Ok(Axis::PMax),
            "m_elements" => Ok(Axis::MElements),
            "n_r" => Ok(Axis::NR),
            other => Err(Error::InvalidConfig(format!(
                "unknown axis {other:?} (expected p_max, m_elements or n_r)"
            ))),
        }
    }
}

/// Random stream for the initial / random IRS phases of one realization.
pub fn theta_stream(master_seed: u64, realization: u64) -> Stream {
    stream(&[master_seed, tag::THETA_INIT, realization])
}

fn covariance_only(eff: &EffectiveChannels, p_max: f64, opts: &AoOptions) -> Result<f64> {
    let (q, _) = sca_optimize(
        eff,
        &TxCovariance::isotropic(eff.n_t(), p_max),
        p_max,
        &opts.sca,
    )?;
    secrecy_rate_effective(eff, &q, true)
}

/// Clamped secrecy rate of one scheme on one realization.
pub fn run_scheme(
    scheme: Scheme,
    chs: &ChannelSet,
    p_max: f64,
    opts: &AoOptions,
    rng: &mut Stream,
) -> Result<f64> {
    scheme.validate()?;
    match scheme {
        Scheme::NoIrs => covariance_only(&EffectiveChannels::direct(chs), p_max, opts),
        Scheme::RandomIrs => {
            let theta = ReflectVector::random(chs.m(), rng);
            covariance_only(&effective_channels(chs, &theta)?, p_max, opts)
        }
        Scheme::AoContinuous => Ok(ao_optimize(chs, p_max, opts, rng)?.secrecy_rate_clamped),
        Scheme::AoDiscrete(q) => {
            let continuous = ao_optimize(chs, p_max, opts, rng)?;
            Ok(apply_projection(chs, p_max, &continuous, q, opts)?.secrecy_rate_clamped)
        }
    }
}

/// Runs several schemes on one realization. Every scheme starts from a fresh
/// copy of `rng`, and the alternating optimizer runs at most once.
pub fn run_schemes(
    schemes: &[Scheme],
    chs: &ChannelSet,
    p_max: f64,
    opts: &AoOptions,
    rng: &Stream,
) -> Result<Vec<f64>> {
    let mut continuous: Option<OptimizerReport> = None;
    let mut out = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        scheme.validate()?;
        let rate = match scheme {
            Scheme::NoIrs | Scheme::RandomIrs => {
                run_scheme(scheme, chs, p_max, opts, &mut rng.clone())?
            }
            Scheme::AoContinuous | Scheme::AoDiscrete(_) => {
                if continuous.is_none() {
                    continuous = Some(ao_optimize(chs, p_max, opts, &mut rng.clone())?);
                }
                let report = continuous.as_ref().expect("just filled");
                match scheme {
                    Scheme::AoDiscrete(q) => {
                        apply_projection(chs, p_max, report, q, opts)?.secrecy_rate_clamped
                    }
                    _ => report.secrecy_rate_clamped,
                }
            }
        };
        out.push(rate);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scenario: ScenarioConfig,
    pub optimizer: AoOptions,
    pub schemes: Vec<Scheme>,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
}

impl SweepConfig {
    pub fn new(scenario: ScenarioConfig) -> Self {
        Self {
            scenario,
            optimizer: AoOptions::default(),
            schemes: Scheme::STANDARD.to_vec(),
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeStats {
    pub scheme: Scheme,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single realization.
    pub std: f64,
    pub n: usize,
    /// Per-realization rates in realization order.
    pub samples: Vec<f64>,
}

impl SchemeStats {
    fn from_samples(scheme: Scheme, samples: Vec<f64>) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self {
            scheme,
            mean,
            std,
            n,
            samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub stats: Vec<SchemeStats>,
    /// Optimizer time summed over the realizations of this point, in seconds.
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: Axis,
    pub schemes: Vec<Scheme>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn axis_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Mean rate of `scheme` at every axis point.
    pub fn means(&self, scheme: Scheme) -> Option<Vec<f64>> {
        let idx = self.schemes.iter().position(|&s| s == scheme)?;
        Some(self.points.iter().map(|p| p.stats[idx].mean).collect())
    }

    pub fn stats(&self, point: usize, scheme: Scheme) -> Option<&SchemeStats> {
        let idx = self.schemes.iter().position(|&s| s == scheme)?;
        self.points.get(point).map(|p| &p.stats[idx])
    }
}

/// Runs every scheme over `n_realizations` paired channel draws at each
/// axis value. Results do not depend on the number of workers.
pub fn monte_carlo_sweep(
    cfg: &SweepConfig,
    axis: Axis,
    values: &[f64],
    n_realizations: usize,
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::InvalidConfig(
            "sweep needs at least one axis value".into(),
        ));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig(
            "axis values must be strictly ascending".into(),
        ));
    }
    if n_realizations == 0 {
        return Err(Error::InvalidConfig(
            "n_realizations must be at least 1".into(),
        ));
    }
    for s in &cfg.schemes {
        s.validate()?;
    }
    cfg.optimizer.validate()?;
    let scenarios = values
        .iter()
        .map(|&v| axis.apply(&cfg.scenario, v))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|p| (0..n_realizations).map(move |r| (p, r)))
        .collect();
    let run = |&(p, r): &(usize, usize)| -> Result<(Vec<f64>, f64)> {
        let start = Instant::now();
        let scenario = &scenarios[p];
        let chs = scenario_channels(scenario, r as u64)?;
        let rng = theta_stream(scenario.master_seed, r as u64);
        let rates = run_schemes(&cfg.schemes, &chs, scenario.p_max, &cfg.optimizer, &rng)?;
        Ok((rates, start.elapsed().as_secs_f64()))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<(Vec<f64>, f64)> =
        pool.install(|| jobs.par_iter().map(run).collect::<Result<_>>())?;

    let points = values
        .iter()
        .enumerate()
        .map(|(p, &value)| {
            let slice = &outcomes[p * n_realizations..(p + 1) * n_realizations];
            let stats = cfg
                .schemes
                .iter()
                .enumerate()
                .map(|(k, &scheme)| {
                    SchemeStats::from_samples(scheme, slice.iter().map(|(r, _)| r[k]).collect())
                })
                .collect();
            SweepPoint {
                value,
                stats,
                wall_time: slice.iter().map(|(_, t)| t).sum(),
            }
        })
        .collect();
    Ok(SweepResult {
        axis,
        schemes: cfg.schemes.clone(),
        points,
    })
}
