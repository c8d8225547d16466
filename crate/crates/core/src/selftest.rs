//! Brute-force oracle suites that cross-check the closed-form solvers.
//!
//! Each case draws from its own stream keyed by the seed, the suite and the
//! case index, so pass/fail vectors are reproducible.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::alternating::{project_discrete, AoOptions};
use crate::channel::{complex_normal, ChannelSet, EffectiveChannels, ReflectVector};
use crate::error::{Error, Result};
use crate::irsopt::{element_subproblem, maximizer_interval, optimal_theta_m, IrsOptions};
use crate::numerics::{hermitian_evd, ComplexMatrix};
use crate::secrecy::TxCovariance;
use crate::streams::{stream, Stream};
use crate::txcov::{inner_waterfill, kkt_residual, sca_optimize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Quick,
    Full,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Scale::Quick),
            "full" => Ok(Scale::Full),
            other => Err(Error::InvalidConfig(format!(
                "unknown scale {other:?} (expected quick or full)"
            ))),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Quick => "quick",
            Scale::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    /// Outcome of every case in order.
    pub outcomes: Vec<bool>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|&&ok| ok).count()
    }

    pub fn total(&self) -> usize {
        self.outcomes.len()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.total()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub scale: Scale,
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::all_passed)
    }
}

const PHASE_GRID_TAG: u64 = 1;
const PROJECTION_TAG: u64 = 2;
const KKT_TAG: u64 = 3;
const INTERVAL_TAG: u64 = 4;

fn run_suite(
    name: &'static str,
    seed: u64,
    tag: u64,
    cases: usize,
    case: impl Fn(&mut Stream) -> Result<bool>,
) -> SuiteReport {
    let outcomes = (0..cases as u64)
        .map(|k| case(&mut stream(&[seed, tag, k])).unwrap_or(false))
        .collect();
    SuiteReport { name, outcomes }
}

/// Closed-form element update against a dense scan of the unit circle.
pub fn phase_grid_case(rng: &mut Stream, grid: usize) -> Result<bool> {
    let (n, m) = (2, 4);
    let chs = ChannelSet::random_gaussian(n, n, n, m, 1.0, rng);
    let q = TxCovariance::random_feasible(n, 2.0, rng);
    let theta = ReflectVector::random(m, rng);
    let idx = rng.random_range(0..m);
    let sub = element_subproblem(&chs, &q, &theta, idx)?;
    let update = optimal_theta_m(&sub, &IrsOptions::default())?;
    let ours = sub.objective(update.theta)?;
    let mut best = f64::NEG_INFINITY;
    for k in 0..grid {
        best = best.max(sub.objective(Complex64::from_polar(1.0, TAU * k as f64 / grid as f64))?);
    }
    Ok(ours >= best - 1e-6)
}

/// Nearest-point projection against enumeration of every alphabet vector.
pub fn projection_case(rng: &mut Stream, m: usize, q_levels: usize) -> Result<bool> {
    let theta = ReflectVector::random(m, rng);
    let ours = project_discrete(&theta, q_levels)?;
    let alphabet: Vec<Complex64> = (0..q_levels)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / q_levels as f64))
        .collect();
    let mut best = (f64::INFINITY, Vec::new());
    for code in 0..q_levels.pow(m as u32) {
        let mut c = code;
        let candidate: Vec<Complex64> = (0..m)
            .map(|_| {
                let s = alphabet[c % q_levels];
                c /= q_levels;
                s
            })
            .collect();
        let dist: f64 = candidate
            .iter()
            .zip(theta.as_slice())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        if dist < best.0 {
            best = (dist, candidate);
        }
    }
    Ok(ours
        .as_slice()
        .iter()
        .zip(&best.1)
        .all(|(a, b)| (a - b).norm() <= 1e-12))
}

/// Feasibility, semidefiniteness and complementary slackness of the covariance
/// optimizer, plus the stationarity residual of the inner water-filling.
pub fn kkt_case(rng: &mut Stream) -> Result<bool> {
    let n_t = rng.random_range(2..=4);
    let n_r = rng.random_range(1..=4);
    let n_e = rng.random_range(1..=4);
    let p_max = 0.1 + 4.9 * rng.random::<f64>();
    let chs = ChannelSet::random_gaussian(n_t, n_r, n_e, 1, 1.0, rng);
    let eff = EffectiveChannels::direct(&chs);
    let opts = AoOptions::default().sca;
    let (q, report) = sca_optimize(&eff, &TxCovariance::isotropic(n_t, p_max), p_max, &opts)?;
    let trace = q.trace();
    let min_eig = hermitian_evd(q.matrix())?.min_eigenvalue();
    let lambda = report.lambda;
    let feasible = trace <= p_max * (1.0 + 1e-6);
    let psd = min_eig >= -1e-9 * trace.max(f64::MIN_POSITIVE);
    let slack = (lambda * (trace - p_max)).abs() <= 1e-4 * (lambda * p_max).max(1.0);

    let a = ComplexMatrix::from_fn(n_t, n_t, |_, _| complex_normal(rng));
    let k = &a * a.adjoint() + ComplexMatrix::identity(n_t, n_t).scale(0.1);
    let wf = inner_waterfill(&eff.g_tr, &k, 1.0)?;
    let stationary = kkt_residual(&eff.g_tr, &k, 1.0, &wf)? <= 1e-6;
    Ok(feasible && psd && slack && stationary)
}

/// Whether the grid maximizer of `(a + b cos x) / (c + d cos(x + ω))` lies in
/// the claimed interval, padded by one grid step on the circle.
pub fn interval_case(rng: &mut Stream, grid: usize) -> Result<bool> {
    let a = 0.1 + 10.0 * rng.random::<f64>();
    let b = a * rng.random_range(0.01..0.99);
    let c = 0.1 + 10.0 * rng.random::<f64>();
    let d = c * rng.random_range(0.01..0.99);
    let omega = TAU * rng.random::<f64>();
    let f = |x: f64| (a + b * x.cos()) / (c + d * (x + omega).cos());
    let step = TAU / grid as f64;
    let (mut best_x, mut best) = (0.0, f(0.0));
    for k in 1..grid {
        let x = step * k as f64;
        if f(x) > best {
            best = f(x);
            best_x = x;
        }
    }
    let (lo, hi) = maximizer_interval(omega)?;
    // the grid wraps, so test the shifted copies too
    let inside = |x: f64| x >= lo - step && x <= hi + step;
    Ok(inside(best_x) || inside(best_x + TAU) || inside(best_x - TAU))
}

/// Case counts and grid sizes for one scale.
struct Plan {
    phase_cases: usize,
    phase_grid: usize,
    projection_cases: usize,
    kkt_cases: usize,
    interval_cases: usize,
    interval_grid: usize,
}

fn plan(scale: Scale) -> Plan {
    match scale {
        Scale::Quick => Plan {
            phase_cases: 20,
            phase_grid: 10_000,
            projection_cases: 200,
            kkt_cases: 20,
            interval_cases: 100,
            interval_grid: 100_000,
        },
        Scale::Full => Plan {
            phase_cases: 200,
            phase_grid: 10_000,
            projection_cases: 1000,
            kkt_cases: 100,
            interval_cases: 1000,
            interval_grid: 100_000,
        },
    }
}

pub fn run_selftest(scale: Scale, seed: u64) -> SelftestReport {
    let p = plan(scale);
    let suites = vec![
        run_suite("phase_grid", seed, PHASE_GRID_TAG, p.phase_cases, |rng| {
            phase_grid_case(rng, p.phase_grid)
        }),
        run_suite(
            "projection_enumeration",
            seed,
            PROJECTION_TAG,
            p.projection_cases,
            |rng| {
                let m = rng.random_range(1..=4);
                let q = [2, 3, 4, 8][rng.random_range(0..4)];
                projection_case(rng, m, q)
            },
        ),
        run_suite("kkt", seed, KKT_TAG, p.kkt_cases, kkt_case),
        run_suite(
            "phase_interval",
            seed,
            INTERVAL_TAG,
            p.interval_cases,
            |rng| interval_case(rng, p.interval_grid),
        ),
    ];
    SelftestReport {
        scale,
        seed,
        suites,
    }
}
