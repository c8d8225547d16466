//! TOML configuration: one flat table per section, unknown keys rejected.
//!
//! Powers may be given in dBm (`*_dbm`) or watts (`*_w`) and are converted
//! to watts at load time. Omitted keys keep the built-in scenario defaults.

use std::fs;
use std::path::Path;

use irs_secopt::bench::{Axis, Scheme};
use irs_secopt::channel::{dbm_to_watts, LosModel, Position, ScenarioConfig};
use irs_secopt::txcov::DualMethod;
use irs_secopt::AoOptions;
use serde::{Deserialize, Serialize};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    scenario: RawScenario,
    #[serde(default)]
    optimizer: RawOptimizer,
    #[serde(default)]
    sweep: RawSweep,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    n_t: Option<usize>,
    n_r: Option<usize>,
    n_e: Option<usize>,
    m: Option<usize>,
    ap: Option<[f64; 2]>,
    user: Option<[f64; 2]>,
    eave: Option<[f64; 2]>,
    irs: Option<[f64; 2]>,
    /// Trade user and eavesdropper positions after loading.
    swap_receivers: Option<bool>,
    p_max_dbm: Option<f64>,
    p_max_w: Option<f64>,
    sigma_r2_dbm: Option<f64>,
    sigma_r2_w: Option<f64>,
    sigma_e2_dbm: Option<f64>,
    sigma_e2_w: Option<f64>,
    rician_tr: Option<f64>,
    rician_te: Option<f64>,
    rician_ts: Option<f64>,
    rician_sr: Option<f64>,
    rician_se: Option<f64>,
    alpha_tr: Option<f64>,
    alpha_te: Option<f64>,
    alpha_ts: Option<f64>,
    alpha_sr: Option<f64>,
    alpha_se: Option<f64>,
    beta0_db: Option<f64>,
    d0: Option<f64>,
    los_model: Option<LosModel>,
    master_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptimizer {
    theta_tol: Option<f64>,
    max_rounds: Option<usize>,
    q_levels: Option<usize>,
    reoptimize_q_after_projection: Option<bool>,
    objective_tol: Option<f64>,
    outer_tol: Option<f64>,
    max_outer_iters: Option<usize>,
    dual_tol_rel: Option<f64>,
    lambda_max_init: Option<f64>,
    lambda_growth: Option<f64>,
    pd_floor: Option<f64>,
    dual_method: Option<String>,
    subgradient_step0: Option<f64>,
    subgradient_iterations: Option<usize>,
    phase_grid: Option<usize>,
    golden_tol: Option<f64>,
    sweep_tol: Option<f64>,
    max_sweeps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: Option<String>,
    values: Option<Vec<f64>>,
    realizations: Option<usize>,
    schemes: Option<Vec<String>>,
    workers: Option<usize>,
}

/// Sweep settings; every field may still be overridden on the command line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSettings {
    pub axis: Option<Axis>,
    pub values: Option<Vec<f64>>,
    pub realizations: usize,
    pub schemes: Vec<Scheme>,
    pub workers: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            axis: None,
            values: None,
            realizations: 100,
            schemes: Scheme::STANDARD.to_vec(),
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Config {
    pub scenario: ScenarioConfig,
    pub optimizer: AoOptions,
    pub sweep: SweepSettings,
}

/// Step size and iteration count used when only `dual_method` selects the subgradient solver.
const SUBGRADIENT_DEFAULTS: (f64, usize) = (1.0, 2000);

fn power(name: &str, dbm: Option<f64>, w: Option<f64>, current: f64) -> Result<f64, String> {
    match (dbm, w) {
        (Some(_), Some(_)) => Err(format!("give either {name}_dbm or {name}_w, not both")),
        (Some(d), None) => Ok(dbm_to_watts(d)),
        (None, Some(w)) => Ok(w),
        (None, None) => Ok(current),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn position(p: [f64; 2]) -> Position {
    Position::new(p[0], p[1])
}

impl RawScenario {
    fn apply(self, s: &mut ScenarioConfig) -> Result<(), String> {
        set(&mut s.n_t, self.n_t);
        set(&mut s.n_r, self.n_r);
        set(&mut s.n_e, self.n_e);
        set(&mut s.m, self.m);
        set(&mut s.ap, self.ap.map(position));
        set(&mut s.user, self.user.map(position));
        set(&mut s.eave, self.eave.map(position));
        set(&mut s.irs, self.irs.map(position));
        s.p_max = power("p_max", self.p_max_dbm, self.p_max_w, s.p_max)?;
        s.sigma_r2 = power("sigma_r2", self.sigma_r2_dbm, self.sigma_r2_w, s.sigma_r2)?;
        s.sigma_e2 = power("sigma_e2", self.sigma_e2_dbm, self.sigma_e2_w, s.sigma_e2)?;
        set(&mut s.rician.tr, self.rician_tr);
        set(&mut s.rician.te, self.rician_te);
        set(&mut s.rician.ts, self.rician_ts);
        set(&mut s.rician.sr, self.rician_sr);
        set(&mut s.rician.se, self.rician_se);
        set(&mut s.path_loss_exponent.tr, self.alpha_tr);
        set(&mut s.path_loss_exponent.te, self.alpha_te);
        set(&mut s.path_loss_exponent.ts, self.alpha_ts);
        set(&mut s.path_loss_exponent.sr, self.alpha_sr);
        set(&mut s.path_loss_exponent.se, self.alpha_se);
        set(&mut s.beta0_db, self.beta0_db);
        set(&mut s.d0, self.d0);
        set(&mut s.los_model, self.los_model);
        set(&mut s.master_seed, self.master_seed);
        if self.swap_receivers == Some(true) {
            *s = s.with_swapped_receivers();
        }
        Ok(())
    }
}

impl RawOptimizer {
    fn apply(self, o: &mut AoOptions) -> Result<(), String> {
        set(&mut o.theta_tol, self.theta_tol);
        set(&mut o.max_rounds, self.max_rounds);
        set(&mut o.q_levels, self.q_levels);
        set(
            &mut o.reoptimize_q_after_projection,
            self.reoptimize_q_after_projection,
        );
        if self.objective_tol.is_some() {
            o.objective_tol = self.objective_tol;
        }
        set(&mut o.sca.outer_tol, self.outer_tol);
        set(&mut o.sca.max_outer_iters, self.max_outer_iters);
        set(&mut o.sca.dual_tol_rel, self.dual_tol_rel);
        set(&mut o.sca.lambda_max_init, self.lambda_max_init);
        set(&mut o.sca.lambda_growth, self.lambda_growth);
        set(&mut o.sca.pd_floor, self.pd_floor);
        let sub = self.subgradient_step0.is_some() || self.subgradient_iterations.is_some();
        let subgradient = match self.dual_method.as_deref() {
            None => sub,
            Some("subgradient") => true,
            Some("bisection") if sub => {
                return Err("subgradient_* keys need dual_method = \"subgradient\"".into())
            }
            Some("bisection") => false,
            Some(other) => {
                return Err(format!(
                    "unknown dual_method {other:?} (expected bisection or subgradient)"
                ))
            }
        };
        if subgradient {
            let (step0, iterations) = match o.sca.dual_method {
                DualMethod::Subgradient { step0, iterations } => (step0, iterations),
                DualMethod::Bisection => SUBGRADIENT_DEFAULTS,
            };
            o.sca.dual_method = DualMethod::Subgradient {
                step0: self.subgradient_step0.unwrap_or(step0),
                iterations: self.subgradient_iterations.unwrap_or(iterations),
            };
        } else if self.dual_method.is_some() {
            o.sca.dual_method = DualMethod::Bisection;
        }
        set(&mut o.irs.phase_grid, self.phase_grid);
        set(&mut o.irs.golden_tol, self.golden_tol);
        set(&mut o.irs.sweep_tol, self.sweep_tol);
        set(&mut o.irs.max_sweeps, self.max_sweeps);
        Ok(())
    }
}

impl RawSweep {
    fn apply(self, s: &mut SweepSettings) -> Result<(), String> {
        if let Some(axis) = self.axis {
            s.axis = Some(axis.parse().map_err(|e: irs_secopt::Error| e.to_string())?);
        }
        if self.values.is_some() {
            s.values = self.values;
        }
        set(&mut s.realizations, self.realizations);
        if let Some(names) = self.schemes {
            s.schemes = names
                .iter()
                .map(|n| n.parse())
                .collect::<Result<_, irs_secopt::Error>>()
                .map_err(|e| e.to_string())?;
        }
        set(&mut s.workers, self.workers);
        Ok(())
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        let mut cfg = Config::default();
        raw.scenario.apply(&mut cfg.scenario)?;
        raw.optimizer.apply(&mut cfg.optimizer)?;
        raw.sweep.apply(&mut cfg.sweep)?;
        Ok(cfg)
    }

    /// Reads `path`; errors name the file.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        self.scenario.validate().map_err(|e| e.to_string())?;
        self.optimizer.validate().map_err(|e| e.to_string())?;
        for s in &self.sweep.schemes {
            s.validate().map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn shipped_default_matches_builtin() {
        let cfg = Config::from_toml(include_str!("../../../configs/default.toml")).unwrap();
        assert_eq!(cfg.scenario, ScenarioConfig::default());
        assert_eq!(cfg.optimizer, AoOptions::default());
        assert_eq!(cfg.sweep.axis, Some(Axis::PMax));
    }

    #[test]
    fn dbm_converted_at_load() {
        let cfg = Config::from_toml("[scenario]\np_max_dbm = 20.0\nsigma_r2_w = 1e-6\n").unwrap();
        assert!((cfg.scenario.p_max - 0.1).abs() < 1e-15);
        assert_eq!(cfg.scenario.sigma_r2, 1e-6);
        assert!(Config::from_toml("[scenario]\np_max_dbm = 20.0\np_max_w = 1.0\n").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Config::from_toml("[scenario]\nn_tx = 4\n").is_err());
        assert!(Config::from_toml("[optimiser]\n").is_err());
        assert!(Config::from_toml("[sweep]\naxis = \"p_max\"\nvalue = [1.0]\n").is_err());
    }

    #[test]
    fn swap_receivers() {
        let cfg = Config::from_toml("[scenario]\nswap_receivers = true\n").unwrap();
        assert_eq!(cfg.scenario.user, ScenarioConfig::default().eave);
    }

    #[test]
    fn dual_method_selection() {
        let cfg = Config::from_toml(
            "[optimizer]\ndual_method = \"subgradient\"\nsubgradient_iterations = 50\n",
        )
        .unwrap();
        assert!(matches!(
            cfg.optimizer.sca.dual_method,
            DualMethod::Subgradient { iterations: 50, .. }
        ));
        let cfg = Config::from_toml("[optimizer]\nsubgradient_step0 = 0.5\n").unwrap();
        assert!(matches!(
            cfg.optimizer.sca.dual_method,
            DualMethod::Subgradient { .. }
        ));
        let cfg = Config::from_toml("[optimizer]\ndual_method = \"bisection\"\n").unwrap();
        assert_eq!(cfg.optimizer.sca.dual_method, DualMethod::Bisection);
        assert!(Config::from_toml(
            "[optimizer]\ndual_method = \"bisection\"\nsubgradient_step0 = 0.5\n"
        )
        .is_err());
        assert!(Config::from_toml("[optimizer]\ndual_method = \"newton\"\n").is_err());
    }

    #[test]
    fn sweep_section() {
        let cfg = Config::from_toml(
            "[sweep]\naxis = \"m_elements\"\nvalues = [10, 20]\nrealizations = 5\nschemes = [\"no_irs\", \"ao_q4\"]\n",
        )
        .unwrap();
        assert_eq!(cfg.sweep.axis, Some(Axis::MElements));
        assert_eq!(cfg.sweep.values, Some(vec![10.0, 20.0]));
        assert_eq!(
            cfg.sweep.schemes,
            vec![Scheme::NoIrs, Scheme::AoDiscrete(4)]
        );
        assert!(Config::from_toml("[sweep]\naxis = \"k\"\n").is_err());
        assert!(Config::from_toml("[sweep]\nschemes = [\"ao_q1\"]\n").is_err());
    }
}
