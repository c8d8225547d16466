//! Secrecy-rate optimization for MIMO wiretap links assisted by an
//! intelligent reflecting surface.
//!
//! The transmit covariance is designed by successive convex approximation
//! with a water-filling inner solver, and the IRS phases by closed-form
//! element-wise updates. The two alternate until the phases settle.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alternating;
pub mod bench;
pub mod channel;
pub mod error;
pub mod irsopt;
pub mod numerics;
pub mod secrecy;
pub mod selftest;
pub mod streams;
pub mod txcov;

pub use alternating::{
    ao_discrete, ao_optimize, optimize, project_discrete, AoOptions, OptimizerReport,
};
pub use bench::{monte_carlo_sweep, run_scheme, Axis, Scheme, SweepConfig, SweepResult};
pub use channel::{scenario_channels, ChannelSet, ReflectVector, ScenarioConfig};
pub use error::{Error, Result};
pub use secrecy::{secrecy_rate, TxCovariance};
pub use txcov::{sca_optimize, ScaOptions};
