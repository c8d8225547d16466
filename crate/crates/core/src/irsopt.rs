//! Element-wise optimization of the IRS reflection coefficients.
//!
//! With the covariance and all other elements fixed, the received Gram
//! matrix is affine in `θ_m` and `θ_m*`:
//!
//! ```text
//! I + G Q Gᴴ / σ² = A + θ_m B + θ_m* Bᴴ,   rank(B) <= 1.
//! ```
//!
//! Writing `J = A⁻¹ B`, the determinant ratio `det(A + θB + θ*Bᴴ) / det A`
//! collapses to a scalar function of `θ_m` that depends only on the trace of
//! `J`. When the trace vanishes it is constant; otherwise it is
//! `1 + |λ|²(1 - vv) + 2 Re(θ λ)` with `λ = Tr J`. The secrecy objective is a
//! ratio of two such functions and is maximized in closed form or by a short
//! one-dimensional search.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSet, ReflectVector};
use crate::error::{Error, Result};
use crate::numerics::{
    complement_basis, frobenius, hermitian_evd, hermitian_part, inverse_hpd, logdet_hpd,
    psd_factor, ComplexMatrix, ComplexVector, TOL,
};
use crate::secrecy::TxCovariance;

/// Per-element quantities for one receiver pair.
#[derive(Debug, Clone)]
pub struct ElementSubproblem {
    pub a_r: ComplexMatrix,
    pub a_e: ComplexMatrix,
    pub b_r: ComplexMatrix,
    pub b_e: ComplexMatrix,
    pub j_r: ComplexMatrix,
    pub j_e: ComplexMatrix,
}

fn log2det_affine(a: &ComplexMatrix, b: &ComplexMatrix, theta: Complex64) -> Result<f64> {
    let m = a + b.map(|z| z * theta) + b.adjoint().map(|z| z * theta.conj());
    Ok(logdet_hpd(&hermitian_part(&m))? / LN_2)
}

impl ElementSubproblem {
    /// Secrecy rate as a function of `θ_m`, evaluated from the determinants
    /// directly. Equal to the full secrecy rate at the same configuration.
    pub fn objective(&self, theta_m: Complex64) -> Result<f64> {
        Ok(log2det_affine(&self.a_r, &self.b_r, theta_m)?
            - log2det_affine(&self.a_e, &self.b_e, theta_m)?)
    }

    /// `log2 det A_R - log2 det A_E`, the part of the objective that does not
    /// move with `θ_m`.
    pub fn baseline(&self) -> Result<f64> {
        Ok((logdet_hpd(&self.a_r)? - logdet_hpd(&self.a_e)?) / LN_2)
    }

    pub fn spectra(&self) -> Result<(Rank1Spectrum, Rank1Spectrum)> {
        Ok((
            rank1_spectrum(&self.j_r, &self.a_r)?,
            rank1_spectrum(&self.j_e, &self.a_e)?,
        ))
    }
}

/// Reflected paths after whitening by a factor of the transmit covariance,
/// kept up to date while elements change one at a time.
struct ReflectedState {
    /// Rows are `h̄_TS,iᴴ`, the transmit-side IRS channels seen through `F`.
    hbar_ts: ComplexMatrix,
    /// `G_TR F` and `G_TE F` at the current configuration.
    g_r: ComplexMatrix,
    g_e: ComplexMatrix,
}

impl ReflectedState {
    fn new(chs: &ChannelSet, q: &TxCovariance, theta: &ReflectVector) -> Result<Self> {
        if q.dim() != chs.n_t() {
            return Err(Error::ShapeMismatch {
                context: "transmit covariance",
                expected: (chs.n_t(), chs.n_t()),
                found: (q.dim(), q.dim()),
            });
        }
        if theta.len() != chs.m() {
            return Err(Error::ShapeMismatch {
                context: "reflection vector",
                expected: (chs.m(), 1),
                found: (theta.len(), 1),
            });
        }
        let f = psd_factor(q.matrix())?;
        let hbar_ts = &chs.h_ts * &f;
        let mut reflected = hbar_ts.clone();
        for (i, t) in theta.as_slice().iter().enumerate() {
            reflected.row_mut(i).iter_mut().for_each(|z| *z *= t);
        }
        Ok(Self {
            g_r: &chs.h_tr * &f + &chs.h_sr * &reflected,
            g_e: &chs.h_te * &f + &chs.h_se * &reflected,
            hbar_ts,
        })
    }

    fn element_term(&self, h_s: &ComplexMatrix, m: usize) -> ComplexMatrix {
        h_s.column(m) * self.hbar_ts.row(m)
    }

    fn subproblem(
        &self,
        chs: &ChannelSet,
        theta_m: Complex64,
        m: usize,
    ) -> Result<ElementSubproblem> {
        let (a_r, b_r, j_r) = side(
            &self.g_r,
            &self.element_term(&chs.h_sr, m),
            theta_m,
            chs.sigma_r2,
        )?;
        let (a_e, b_e, j_e) = side(
            &self.g_e,
            &self.element_term(&chs.h_se, m),
            theta_m,
            chs.sigma_e2,
        )?;
        Ok(ElementSubproblem {
            a_r,
            a_e,
            b_r,
            b_e,
            j_r,
            j_e,
        })
    }

    fn shift(&mut self, chs: &ChannelSet, m: usize, delta: Complex64) {
        self.g_r += self.element_term(&chs.h_sr, m).map(|z| z * delta);
        self.g_e += self.element_term(&chs.h_se, m).map(|z| z * delta);
    }
}

/// `A`, `B` and `J = A⁻¹B` for one receiver, given its whitened effective
/// channel `g` (which includes element `m` at `theta_m`) and the rank-one
/// term `h̃` of element `m`.
fn side(
    g: &ComplexMatrix,
    h_tilde: &ComplexMatrix,
    theta_m: Complex64,
    sigma2: f64,
) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    let h_hat = g - h_tilde.map(|z| z * theta_m);
    let n = g.nrows();
    let a = hermitian_part(
        &(ComplexMatrix::identity(n, n)
            + (&h_hat * h_hat.adjoint() + h_tilde * h_tilde.adjoint()).unscale(sigma2)),
    );
    let b = (h_tilde * h_hat.adjoint()).unscale(sigma2);
    let j = inverse_hpd(&a)? * &b;
    Ok((a, b, j))
}

/// Builds the subproblem of element `m` (zero-based) with everything else fixed.
pub fn element_subproblem(
    chs: &ChannelSet,
    q: &TxCovariance,
    theta: &ReflectVector,
    m: usize,
) -> Result<ElementSubproblem> {
    if m >= chs.m() {
        return Err(Error::IndexOutOfRange {
            index: m,
            len: chs.m(),
        });
    }
    ReflectedState::new(chs, q, theta)?.subproblem(chs, theta.get(m), m)
}

/// Spectral data of a rank-one `J = A⁻¹B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank1Spectrum {
    pub trace_nonzero: bool,
    /// The only nonzero eigenvalue, `Tr J`.
    pub lambda: Complex64,
    /// `V₁₁ (V⁻¹)₁₁` with `V = Uᴴ A U` in the eigenbasis `U` of `J`; zero
    /// when the trace vanishes.
    pub vv_product: f64,
}

impl Rank1Spectrum {
    /// `(α, β)` of `α + β cos(φ + arg λ)`.
    pub fn alpha_beta(&self) -> (f64, f64) {
        let l2 = self.lambda.norm_sqr();
        (1.0 + l2 * (1.0 - self.vv_product), 2.0 * self.lambda.norm())
    }
}

/// Eigen-structure of a rank-one `j` relative to the Hermitian PD `a`.
pub fn rank1_spectrum(j: &ComplexMatrix, a: &ComplexMatrix) -> Result<Rank1Spectrum> {
    let n = j.nrows();
    if n != j.ncols() || a.shape() != j.shape() {
        return Err(Error::ShapeMismatch {
            context: "rank1_spectrum",
            expected: (n, n),
            found: a.shape(),
        });
    }
    let norm = frobenius(j);
    let zero = Rank1Spectrum {
        trace_nonzero: false,
        lambda: j.trace(),
        vv_product: 0.0,
    };
    if norm == 0.0 {
        return Ok(zero);
    }
    // Dominant right singular vector from the Gram matrix. (The general
    // complex SVD in nalgebra is unreliable on rank-deficient input.)
    let gram = hermitian_evd(&hermitian_part(&(j.adjoint() * j)))?;
    let v: ComplexVector = gram.eigenvectors.column(n - 1).into_owned();
    let u: ComplexVector = j * &v;
    let s1 = u.norm();
    // ‖J - u vᴴ‖_F bounds the second singular value from above.
    let ratio = frobenius(&(j - &u * v.adjoint())) / s1;
    if !(ratio <= TOL.rank_one_rel) {
        return Err(Error::RankTooHigh { ratio });
    }
    let trace = j.trace();
    if trace.norm() <= TOL.trace_zero_rel * norm.max(1.0) {
        return Ok(zero);
    }
    let mut basis = ComplexMatrix::zeros(n, n);
    basis.set_column(0, &u);
    if n > 1 {
        basis
            .view_mut((0, 1), (n, n - 1))
            .copy_from(&complement_basis(&v)?);
    }
    let v_mat = hermitian_part(&(basis.adjoint() * a * &basis));
    let v_inv = inverse_hpd(&v_mat)?;
    Ok(Rank1Spectrum {
        trace_nonzero: true,
        lambda: trace,
        vv_product: (v_mat[(0, 0)] * v_inv[(0, 0)]).re,
    })
}

fn check_unit(theta_m: Complex64) -> Result<()> {
    let modulus = theta_m.norm();
    if (modulus - 1.0).abs() > TOL.unit_modulus {
        return Err(Error::NonUnitModulus { modulus });
    }
    Ok(())
}

/// `log2 det(A - Bᴴ A⁻¹ B) - log2 det A`, the value of a side whose `J` has zero trace.
fn flat_side(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let schur = hermitian_part(&(a - b.adjoint() * inverse_hpd(a)? * b));
    Ok((logdet_hpd(&schur)? - logdet_hpd(a)?) / LN_2)
}

fn curved_side(spec: &Rank1Spectrum, theta_m: Complex64) -> Result<f64> {
    let (alpha, _) = spec.alpha_beta();
    let argument = alpha + 2.0 * (theta_m * spec.lambda).re;
    if !(argument > 0.0) {
        return Err(Error::LogDomain { argument });
    }
    Ok(argument.log2())
}

/// Objective with the `θ_m`-independent baseline removed.
pub fn rbar_value(
    sub: &ElementSubproblem,
    specs: (&Rank1Spectrum, &Rank1Spectrum),
    theta_m: Complex64,
) -> Result<f64> {
    check_unit(theta_m)?;
    let legit = if specs.0.trace_nonzero {
        curved_side(specs.0, theta_m)?
    } else {
        flat_side(&sub.a_r, &sub.b_r)?
    };
    let eave = if specs.1.trace_nonzero {
        curved_side(specs.1, theta_m)?
    } else {
        flat_side(&sub.a_e, &sub.b_e)?
    };
    Ok(legit - eave)
}

/// Interval known to contain a maximizer of
/// `(a + b cos x) / (c + d cos(x + ω))` for `a > b > 0`, `c > d > 0`.
pub fn maximizer_interval(omega: f64) -> Result<(f64, f64)> {
    if !(0.0..TAU).contains(&omega) {
        return Err(Error::OutOfRange(omega));
    }
    Ok(if omega < PI {
        (0.0, PI - omega)
    } else {
        (3.0 * PI - omega, TAU)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Both traces vanish: the objective does not depend on `θ_m`.
    Flat,
    /// Only the legitimate side moves.
    LegitOnly,
    /// Only the eavesdropper side moves.
    EaveOnly,
    /// Both sides move; searched numerically.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrsOptions {
    /// Grid points of the coarse phase search.
    pub phase_grid: usize,
    /// Golden-section stopping width in radians.
    pub golden_tol: f64,
    /// Sweeps stop once `sum_m |θ̂_m - θ_m|` falls to this value.
    pub sweep_tol: f64,
    pub max_sweeps: usize,
}

impl Default for IrsOptions {
    fn default() -> Self {
        Self {
            phase_grid: 2048,
            golden_tol: 1e-10,
            sweep_tol: 1e-4,
            max_sweeps: 50,
        }
    }
}

impl IrsOptions {
    pub fn validate(&self) -> Result<()> {
        if self.phase_grid < 2 {
            return Err(Error::InvalidConfig("phase_grid must be at least 2".into()));
        }
        if !(self.golden_tol > 0.0) || !(self.sweep_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "golden_tol and sweep_tol must be positive".into(),
            ));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaUpdate {
    pub theta: Complex64,
    /// `rbar_value` at `theta`.
    pub value: f64,
    pub branch: Branch,
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Maximizes `log2((a + b cos x) / (c + d cos(x + ω)))` over the interval
/// that provably holds a maximizer: coarse grid, then golden section around
/// the best grid point.
fn search_ratio(a: f64, b: f64, c: f64, d: f64, omega: f64, opts: &IrsOptions) -> Result<f64> {
    let (lo, hi) = maximizer_interval(omega)?;
    let g = |x: f64| ((a + b * x.cos()) / (c + d * (x + omega).cos())).log2();
    let n = opts.phase_grid;
    let step = (hi - lo) / (n - 1) as f64;
    let (mut best_x, mut best_g) = (lo, g(lo));
    for k in 1..n {
        let x = lo + step * k as f64;
        let v = g(x);
        if v > best_g {
            best_x = x;
            best_g = v;
        }
    }
    if step == 0.0 {
        return Ok(best_x);
    }
    let (x, v) = golden_max(
        g,
        (best_x - step).max(lo),
        (best_x + step).min(hi),
        opts.golden_tol,
    );
    Ok(if v > best_g { x } else { best_x })
}

fn positive_pair(spec: &Rank1Spectrum) -> Result<(f64, f64)> {
    let (alpha, beta) = spec.alpha_beta();
    if !(alpha > beta && beta > 0.0) {
        return Err(Error::LogDomain {
            argument: alpha - beta,
        });
    }
    Ok((alpha, beta))
}

/// Best `θ_m` for one subproblem.
pub fn optimal_theta_m(sub: &ElementSubproblem, opts: &IrsOptions) -> Result<ThetaUpdate> {
    let (r, e) = sub.spectra()?;
    optimal_theta_with(sub, &r, &e, opts)
}

fn optimal_theta_with(
    sub: &ElementSubproblem,
    r: &Rank1Spectrum,
    e: &Rank1Spectrum,
    opts: &IrsOptions,
) -> Result<ThetaUpdate> {
    let (theta, branch) = match (r.trace_nonzero, e.trace_nonzero) {
        (false, false) => (Complex64::new(1.0, 0.0), Branch::Flat),
        (true, false) => (
            Complex64::from_polar(1.0, -r.lambda.arg()),
            Branch::LegitOnly,
        ),
        (false, true) => (
            Complex64::from_polar(1.0, PI - e.lambda.arg()),
            Branch::EaveOnly,
        ),
        (true, true) => {
            let (a, b) = positive_pair(r)?;
            let (c, d) = positive_pair(e)?;
            let phi_r = r.lambda.arg();
            let omega = (e.lambda.arg() - phi_r).rem_euclid(TAU);
            // rem_euclid can round up to exactly TAU.
            let omega = if omega >= TAU { 0.0 } else { omega };
            let x = search_ratio(a, b, c, d, omega, opts)?;
            (Complex64::from_polar(1.0, x - phi_r), Branch::Both)
        }
    };
    let value = rbar_value(sub, (r, e), theta)?;
    Ok(ThetaUpdate {
        theta,
        value,
        branch,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IrsReport {
    /// Objective before the first update and after every element update.
    pub objective_trace: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    /// Number of element updates that took each branch.
    pub branch_counts: [usize; 4],
    /// Updates rejected because they would have lowered the objective.
    pub rejected: usize,
}

fn branch_index(b: Branch) -> usize {
    match b {
        Branch::Flat => 0,
        Branch::LegitOnly => 1,
        Branch::EaveOnly => 2,
        Branch::Both => 3,
    }
}

/// Cyclic coordinate ascent over the elements in ascending order.
///
/// A flat element keeps its current value, since any unit coefficient is
/// optimal there. A candidate that would lower the exact objective (possible
/// only through round-off in the closed forms) is discarded.
pub fn optimize_thetas(
    chs: &ChannelSet,
    q: &TxCovariance,
    theta0: &ReflectVector,
    opts: &IrsOptions,
) -> Result<(ReflectVector, IrsReport)> {
    opts.validate()?;
    let mut state = ReflectedState::new(chs, q, theta0)?;
    let mut theta = theta0.clone();
    let mut report = IrsReport::default();
    let mut current = None;
    for _ in 0..opts.max_sweeps {
        let before = theta.clone();
        for m in 0..chs.m() {
            let old = theta.get(m);
            let sub = state.subproblem(chs, old, m)?;
            let old_value = sub.objective(old)?;
            if current.is_none() {
                report.objective_trace.push(old_value);
            }
            let update = optimal_theta_m(&sub, opts)?;
            report.branch_counts[branch_index(update.branch)] += 1;
            let mut value = old_value;
            if update.branch != Branch::Flat {
                let new_value = sub.objective(update.theta)?;
                if new_value >= old_value {
                    theta.set(m, update.theta)?;
                    state.shift(chs, m, update.theta - old);
                    value = new_value;
                } else {
                    report.rejected += 1;
                }
            }
            report.objective_trace.push(value);
            current = Some(value);
        }
        report.sweeps += 1;
        if theta.l1_distance(&before) <= opts.sweep_tol {
            report.converged = true;
            break;
        }
    }
    Ok((theta, report))
}
