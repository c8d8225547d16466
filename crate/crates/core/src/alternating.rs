//! Alternating optimization of the transmit covariance and the IRS phases,
//! with an optional projection onto a finite phase alphabet.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{effective_channels, ChannelSet, ReflectVector};
use crate::error::{Error, Result};
use crate::irsopt::{optimize_thetas, IrsOptions};
use crate::secrecy::{secrecy_rate, TxCovariance};
use crate::txcov::{sca_optimize, ScaOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AoOptions {
    /// Stop once `sum_m |θ̂_m - θ_m|` over a round falls to this value.
    pub theta_tol: f64,
    pub max_rounds: usize,
    pub sca: ScaOptions,
    pub irs: IrsOptions,
    /// Phase alphabet size; 0 means continuous phases.
    pub q_levels: usize,
    /// Rerun the covariance step once after projecting onto the alphabet.
    pub reoptimize_q_after_projection: bool,
    /// Optional extra stop: objective gain over a round at most this many bits.
    pub objective_tol: Option<f64>,
}

impl Default for AoOptions {
    fn default() -> Self {
        Self {
            theta_tol: 1e-4,
            max_rounds: 30,
            sca: ScaOptions::default(),
            irs: IrsOptions::default(),
            q_levels: 0,
            reoptimize_q_after_projection: false,
            objective_tol: None,
        }
    }
}

impl AoOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "theta_tol must be positive, got {}",
                self.theta_tol
            )));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidConfig("max_rounds must be at least 1".into()));
        }
        if self.q_levels == 1 {
            return Err(Error::BadLevelCount(1));
        }
        if let Some(tol) = self.objective_tol {
            if !(tol > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "objective_tol must be positive, got {tol}"
                )));
            }
        }
        self.sca.validate()?;
        self.irs.validate()
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerReport {
    /// Unclamped secrecy rate at the start, then after every covariance step
    /// and every phase step. A discrete run appends one entry for the
    /// projected configuration.
    pub objective_trace: Vec<f64>,
    pub rounds: usize,
    pub converged: bool,
    pub final_q: TxCovariance,
    pub final_theta: ReflectVector,
    pub secrecy_rate_clamped: f64,
    /// Seconds spent in the optimizer.
    pub wall_time: f64,
    /// Alphabet size of `final_theta`; 0 for continuous phases.
    pub q_levels: usize,
}

/// Equality ignores `wall_time`, which is the only nondeterministic field.
impl PartialEq for OptimizerReport {
    fn eq(&self, other: &Self) -> bool {
        self.objective_trace == other.objective_trace
            && self.rounds == other.rounds
            && self.converged == other.converged
            && self.final_q == other.final_q
            && self.final_theta == other.final_theta
            && self.secrecy_rate_clamped == other.secrecy_rate_clamped
            && self.q_levels == other.q_levels
    }
}

/// Continuous-phase alternating optimization. The initial phases are drawn
/// uniformly from `rng` and the covariance starts isotropic at full power.
pub fn ao_optimize(
    chs: &ChannelSet,
    p_max: f64,
    opts: &AoOptions,
    rng: &mut impl Rng,
) -> Result<OptimizerReport> {
    let theta0 = ReflectVector::random(chs.m(), rng);
    ao_optimize_from(chs, p_max, opts, theta0)
}

/// As [`ao_optimize`], from a given initial phase vector.
pub fn ao_optimize_from(
    chs: &ChannelSet,
    p_max: f64,
    opts: &AoOptions,
    theta0: ReflectVector,
) -> Result<OptimizerReport> {
    opts.validate()?;
    if !(p_max > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "p_max must be positive, got {p_max}"
        )));
    }
    let start = Instant::now();
    let mut theta = theta0;
    let mut q = TxCovariance::isotropic(chs.n_t(), p_max);
    let mut trace = vec![secrecy_rate(chs, &theta, &q, false)?];
    let mut rounds = 0;
    let mut converged = false;
    while rounds < opts.max_rounds {
        rounds += 1;
        let round_start = *trace.last().expect("trace is never empty");
        let eff = effective_channels(chs, &theta)?;
        let (q_hat, _) = sca_optimize(&eff, &q, p_max, &opts.sca)?;
        q = q_hat;
        trace.push(secrecy_rate(chs, &theta, &q, false)?);

        let (theta_hat, _) = optimize_thetas(chs, &q, &theta, &opts.irs)?;
        let moved = theta_hat.l1_distance(&theta);
        theta = theta_hat;
        let now = secrecy_rate(chs, &theta, &q, false)?;
        trace.push(now);

        if moved <= opts.theta_tol
            || opts
                .objective_tol
                .is_some_and(|tol| now - round_start <= tol)
        {
            converged = true;
            break;
        }
    }
    let clamped = secrecy_rate(chs, &theta, &q, true)?;
    Ok(OptimizerReport {
        objective_trace: trace,
        rounds,
        converged,
        final_q: q,
        final_theta: theta,
        secrecy_rate_clamped: clamped,
        wall_time: start.elapsed().as_secs_f64(),
        q_levels: 0,
    })
}

/// Nearest point of the `q_levels`-ary phase alphabet for every element,
/// by chordal distance; ties go to the smaller index.
pub fn project_discrete(theta: &ReflectVector, q_levels: usize) -> Result<ReflectVector> {
    if q_levels < 2 {
        return Err(Error::BadLevelCount(q_levels));
    }
    let grid: Vec<Complex64> = (0..q_levels)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / q_levels as f64))
        .collect();
    let projected = theta
        .as_slice()
        .iter()
        .map(|t| {
            let mut best = 0;
            let mut best_d = (t - grid[0]).norm();
            for (k, g) in grid.iter().enumerate().skip(1) {
                let d = (t - g).norm();
                // Distances within round-off of each other count as a tie.
                if d < best_d - 1e-12 {
                    best = k;
                    best_d = d;
                }
            }
            grid[best]
        })
        .collect();
    ReflectVector::new(projected)
}

/// Projects the phases of a finished continuous run and re-evaluates the
/// rate at the continuous covariance (or a re-optimized one, if enabled).
pub fn apply_projection(
    chs: &ChannelSet,
    p_max: f64,
    continuous: &OptimizerReport,
    q_levels: usize,
    opts: &AoOptions,
) -> Result<OptimizerReport> {
    let start = Instant::now();
    let theta = project_discrete(&continuous.final_theta, q_levels)?;
    let mut q = continuous.final_q.clone();
    if opts.reoptimize_q_after_projection {
        let eff = effective_channels(chs, &theta)?;
        q = sca_optimize(&eff, &q, p_max, &opts.sca)?.0;
    }
    let mut trace = continuous.objective_trace.clone();
    trace.push(secrecy_rate(chs, &theta, &q, false)?);
    Ok(OptimizerReport {
        objective_trace: trace,
        rounds: continuous.rounds,
        converged: continuous.converged,
        secrecy_rate_clamped: secrecy_rate(chs, &theta, &q, true)?,
        final_q: q,
        final_theta: theta,
        wall_time: continuous.wall_time + start.elapsed().as_secs_f64(),
        q_levels,
    })
}

/// Continuous optimization followed by projection onto `opts.q_levels` phases.
pub fn ao_discrete(
    chs: &ChannelSet,
    p_max: f64,
    opts: &AoOptions,
    rng: &mut impl Rng,
) -> Result<OptimizerReport> {
    if opts.q_levels < 2 {
        return Err(Error::BadLevelCount(opts.q_levels));
    }
    let continuous = ao_optimize(chs, p_max, opts, rng)?;
    apply_projection(chs, p_max, &continuous, opts.q_levels, opts)
}

/// Dispatches on `opts.q_levels`.
pub fn optimize(
    chs: &ChannelSet,
    p_max: f64,
    opts: &AoOptions,
    rng: &mut impl Rng,
) -> Result<OptimizerReport> {
    if opts.q_levels == 0 {
        ao_optimize(chs, p_max, opts, rng)
    } else {
        ao_discrete(chs, p_max, opts, rng)
    }
}
