//! Transmit covariance design for a fixed IRS configuration.
//!
//! The secrecy rate is a difference of concave log-determinants. Each outer
//! step linearizes the eavesdropper term at the current point and maximizes
//! the resulting concave surrogate under the power budget. The surrogate has
//! the form "log-det reward minus a linear price", so for a given dual
//! variable it is solved in closed form by water-filling in a whitened basis,
//! and the dual variable itself is found by bisection on the (monotone)
//! transmitted power.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::channel::EffectiveChannels;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_evd, hermitian_part, inverse_hpd, ComplexMatrix, EvdResult, TOL};
use crate::secrecy::{rate_eave, rate_legit, secrecy_rate_effective, TxCovariance};

/// How the scalar dual problem over the power price is solved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DualMethod {
    Bisection,
    /// Projected subgradient with diminishing step `step0 / sqrt(k)`.
    Subgradient {
        step0: f64,
        iterations: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaOptions {
    /// Stop once the objective moves by at most this many bits.
    pub outer_tol: f64,
    pub max_outer_iters: usize,
    /// Complementary-slackness tolerance as a fraction of the power budget.
    pub dual_tol_rel: f64,
    pub lambda_max_init: f64,
    pub lambda_growth: f64,
    pub pd_floor: f64,
    pub dual_method: DualMethod,
}

impl Default for ScaOptions {
    fn default() -> Self {
        Self {
            outer_tol: 1e-5,
            max_outer_iters: 100,
            dual_tol_rel: 1e-6,
            lambda_max_init: 1.0,
            lambda_growth: 10.0,
            pd_floor: 1e-12,
            dual_method: DualMethod::Bisection,
        }
    }
}

impl ScaOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("outer_tol", self.outer_tol),
            ("dual_tol_rel", self.dual_tol_rel),
            ("lambda_max_init", self.lambda_max_init),
            ("pd_floor", self.pd_floor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.lambda_growth > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda_growth must exceed 1, got {}",
                self.lambda_growth
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::InvalidConfig(
                "max_outer_iters must be at least 1".into(),
            ));
        }
        if let DualMethod::Subgradient { step0, iterations } = self.dual_method {
            if !(step0 > 0.0) || iterations == 0 {
                return Err(Error::InvalidConfig(
                    "subgradient needs step0 > 0 and iterations > 0".into(),
                ));
            }
        }
        Ok(())
    }
}

const MAX_BRACKET_GROWTHS: usize = 60;
const MAX_DUAL_STEPS: usize = 200;
/// Slack tolerated before an SCA step counts as a decrease.
const ASCENT_SLACK: f64 = 1e-12;

/// `W_E = I + G_TE Q̃ G_TEᴴ / σ_E²`.
fn eave_whitener(eff: &EffectiveChannels, q_tilde: &TxCovariance) -> ComplexMatrix {
    let g = &eff.g_te;
    let n = g.nrows();
    ComplexMatrix::identity(n, n) + (g * q_tilde.matrix() * g.adjoint()).unscale(eff.sigma_e2)
}

/// Gradient of the eavesdropper rate at `Q̃`: `G_TEᴴ W_E⁻¹ G_TE / (σ_E² ln 2)`.
pub fn eave_price(eff: &EffectiveChannels, q_tilde: &TxCovariance) -> Result<ComplexMatrix> {
    let w_inv = inverse_hpd(&eave_whitener(eff, q_tilde))?;
    let g = &eff.g_te;
    Ok(hermitian_part(
        &(g.adjoint() * w_inv * g).unscale(eff.sigma_e2 * LN_2),
    ))
}

/// First-order surrogate of the secrecy rate around `q_tilde`. Touches the
/// true objective at `q = q_tilde` and lies below it elsewhere.
pub fn linearized_secrecy(
    q: &TxCovariance,
    q_tilde: &TxCovariance,
    eff: &EffectiveChannels,
) -> Result<f64> {
    let price = eave_price(eff, q_tilde)?;
    let delta = q.matrix() - q_tilde.matrix();
    let linear = (price * delta).trace().re;
    Ok(rate_legit(&eff.g_tr, q, eff.sigma_r2)?
        - rate_eave(&eff.g_te, q_tilde, eff.sigma_e2)?
        - linear)
}

/// Price matrix `K0 + λI` kept in factored form, so the whitening for any
/// `λ` costs no extra eigendecomposition.
struct PricedProblem<'a> {
    g_tr: &'a ComplexMatrix,
    sigma_r2: f64,
    k0: EvdResult,
}

impl<'a> PricedProblem<'a> {
    fn new(g_tr: &'a ComplexMatrix, k0: &ComplexMatrix, sigma_r2: f64) -> Result<Self> {
        Ok(Self {
            g_tr,
            sigma_r2,
            k0: hermitian_evd(k0)?,
        })
    }

    fn min_price(&self) -> f64 {
        self.k0.min_eigenvalue()
    }

    fn solve(&self, lambda: f64, pd_floor: f64) -> Result<TxCovariance> {
        let min = self.min_price() + lambda;
        if !(min > pd_floor) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        let k_inv_sqrt = self.k0.map_spectrum(|k| 1.0 / (k + lambda).sqrt());
        Ok(waterfill_whitened(self.g_tr, &k_inv_sqrt, self.sigma_r2))
    }
}

/// Water-filling in the basis whitened by `K^{-1/2}`.
fn waterfill_whitened(
    g_tr: &ComplexMatrix,
    k_inv_sqrt: &ComplexMatrix,
    sigma_r2: f64,
) -> TxCovariance {
    let h = (g_tr * k_inv_sqrt).unscale(sigma_r2.sqrt());
    let gram = hermitian_part(&(h.adjoint() * &h));
    // The Gram matrix is Hermitian by construction, so the EVD cannot reject it.
    let evd = hermitian_evd(&gram).expect("Gram matrix is Hermitian");
    let x = evd.map_spectrum(|s2| {
        if s2 > 0.0 {
            (1.0 / LN_2 - 1.0 / s2).max(0.0)
        } else {
            0.0
        }
    });
    TxCovariance::from_trusted(k_inv_sqrt * x * k_inv_sqrt)
}

/// Maximizer of `log2 det(I + G Q Gᴴ / σ²) - Tr(K Q)` over `Q ⪰ 0`.
pub fn inner_waterfill(
    g_tr: &ComplexMatrix,
    k: &ComplexMatrix,
    sigma_r2: f64,
) -> Result<TxCovariance> {
    let problem = PricedProblem::new(g_tr, k, sigma_r2)?;
    problem.solve(0.0, TOL.pd_floor)
}

/// Norm of the projected gradient of the inner objective at `q`; zero at the
/// optimum. Combines the complementarity residual `‖∇ Q‖_F` with the largest
/// positive eigenvalue of the gradient (dual infeasibility).
pub fn kkt_residual(
    g_tr: &ComplexMatrix,
    k: &ComplexMatrix,
    sigma_r2: f64,
    q: &TxCovariance,
) -> Result<f64> {
    let n = g_tr.nrows();
    let s = ComplexMatrix::identity(n, n).scale(sigma_r2) + g_tr * q.matrix() * g_tr.adjoint();
    let grad = hermitian_part(&((g_tr.adjoint() * inverse_hpd(&s)? * g_tr).unscale(LN_2) - k));
    let comp = crate::numerics::frobenius(&(&grad * q.matrix()));
    let top = hermitian_evd(&grad)?.eigenvalues.max().max(0.0);
    Ok(comp.hypot(top))
}

#[derive(Debug, Clone)]
pub struct DualSolution {
    pub q: TxCovariance,
    pub lambda: f64,
}

/// Solves the surrogate problem at `q_tilde` under `Tr Q <= p_max`.
pub fn dual_solve(
    eff: &EffectiveChannels,
    q_tilde: &TxCovariance,
    p_max: f64,
    opts: &ScaOptions,
) -> Result<DualSolution> {
    let k0 = eave_price(eff, q_tilde)?;
    let problem = PricedProblem::new(&eff.g_tr, &k0, eff.sigma_r2)?;
    match opts.dual_method {
        DualMethod::Bisection => bisect(&problem, p_max, opts),
        DualMethod::Subgradient { step0, iterations } => {
            subgradient(&problem, p_max, opts, step0, iterations)
        }
    }
}

fn bisect(problem: &PricedProblem, p_max: f64, opts: &ScaOptions) -> Result<DualSolution> {
    let dual_tol = opts.dual_tol_rel * p_max;
    if problem.min_price() > opts.pd_floor {
        let q = problem.solve(0.0, opts.pd_floor)?;
        if q.trace() <= p_max {
            return Ok(DualSolution { q, lambda: 0.0 });
        }
    }

    let mut lo = 0.0;
    let mut hi = opts.lambda_max_init;
    let mut q_hi = problem.solve(hi, opts.pd_floor)?;
    let mut growths = 0;
    while q_hi.trace() > p_max {
        if growths == MAX_BRACKET_GROWTHS {
            return Err(Error::BracketingFailure { lambda: hi });
        }
        lo = hi;
        hi *= opts.lambda_growth;
        q_hi = problem.solve(hi, opts.pd_floor)?;
        growths += 1;
    }

    // Illinois regula falsi on f(λ) = Tr Q(λ) - P, falling back to bisection
    // while the lower end is unbounded (λ = 0 with a singular price).
    let mut f_lo = if lo > 0.0 {
        problem.solve(lo, opts.pd_floor)?.trace() - p_max
    } else {
        f64::INFINITY
    };
    let mut f_hi = q_hi.trace() - p_max;
    let mut last_side = 0i8;
    for _ in 0..MAX_DUAL_STEPS {
        if -hi * f_hi <= dual_tol * hi.max(1.0) || hi - lo <= f64::EPSILON * hi {
            break;
        }
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let mid = if f_lo.is_finite() && secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let q_mid = problem.solve(mid, opts.pd_floor)?;
        let f_mid = q_mid.trace() - p_max;
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
            if last_side == -1 {
                f_hi *= 0.5;
            }
            last_side = -1;
        } else {
            hi = mid;
            f_hi = f_mid;
            q_hi = q_mid;
            if last_side == 1 {
                f_lo *= 0.5;
            }
            last_side = 1;
        }
    }
    Ok(DualSolution {
        q: q_hi,
        lambda: hi,
    })
}

fn subgradient(
    problem: &PricedProblem,
    p_max: f64,
    opts: &ScaOptions,
    step0: f64,
    iterations: usize,
) -> Result<DualSolution> {
    // Keeps K0 + λI invertible when the eavesdropper price alone is singular.
    let floor = (opts.pd_floor - problem.min_price()).max(0.0) * 2.0;
    let mut lambda = opts.lambda_max_init.max(floor);
    let mut q = problem.solve(lambda, opts.pd_floor)?;
    for k in 1..=iterations {
        let step = step0 / (k as f64).sqrt();
        lambda = (lambda + step * (q.trace() - p_max)).max(floor);
        q = problem.solve(lambda, opts.pd_floor)?;
    }
    let t = q.trace();
    if t > p_max {
        q = q.scaled(p_max / t);
    }
    Ok(DualSolution { q, lambda })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaReport {
    /// Unclamped secrecy rate at the start point and after every accepted step.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Dual variable of the returned covariance.
    pub lambda: f64,
}

/// Successive convex approximation from `q0`. Steps that would lower the
/// objective (which only happens through round-off near a fixed point) are
/// rejected and end the loop, so the trace is non-decreasing.
pub fn sca_optimize(
    eff: &EffectiveChannels,
    q0: &TxCovariance,
    p_max: f64,
    opts: &ScaOptions,
) -> Result<(TxCovariance, ScaReport)> {
    opts.validate()?;
    if q0.dim() != eff.n_t() {
        return Err(Error::ShapeMismatch {
            context: "sca_optimize",
            expected: (eff.n_t(), eff.n_t()),
            found: (q0.dim(), q0.dim()),
        });
    }
    let mut q = q0.clone();
    let mut objective = secrecy_rate_effective(eff, &q, false)?;
    let mut report = ScaReport {
        objective_trace: vec![objective],
        iterations: 0,
        converged: false,
        lambda: f64::NAN,
    };
    for _ in 0..opts.max_outer_iters {
        let step = dual_solve(eff, &q, p_max, opts)?;
        report.iterations += 1;
        if report.lambda.is_nan() {
            report.lambda = step.lambda;
        }
        let next = secrecy_rate_effective(eff, &step.q, false)?;
        if next < objective - ASCENT_SLACK {
            report.converged = true;
            break;
        }
        q = step.q;
        report.lambda = step.lambda;
        report.objective_trace.push(next);
        let moved = (next - objective).abs();
        objective = next;
        if moved <= opts.outer_tol {
            report.converged = true;
            break;
        }
    }
    Ok((q, report))
}
