//! Legitimate, eavesdropper and secrecy rates of the wiretap link.

use std::f64::consts::LN_2;

use rand::Rng;

use crate::channel::{
    complex_normal, effective_channels, ChannelSet, EffectiveChannels, ReflectVector,
};
use crate::error::{Error, Result};
use crate::numerics::{
    ensure_square, frobenius, hermitian_evd, hermitian_part, relative_asymmetry, ComplexMatrix, TOL,
};

/// Hermitian PSD transmit covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct TxCovariance(ComplexMatrix);

impl TxCovariance {
    /// Validates symmetry and semidefiniteness; stores the Hermitian part.
    pub fn new(q: ComplexMatrix) -> Result<Self> {
        ensure_square(&q, "TxCovariance")?;
        let asymmetry = relative_asymmetry(&q);
        if asymmetry > TOL.hermitian_rel {
            return Err(Error::NotHermitian { asymmetry });
        }
        let q = hermitian_part(&q);
        let evd = hermitian_evd(&q)?;
        let trace = q.trace().re;
        let min = evd.min_eigenvalue();
        if min < -TOL.psd_rel * trace.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self(q))
    }

    /// Caller guarantees `q` is Hermitian PSD.
    pub(crate) fn from_trusted(q: ComplexMatrix) -> Self {
        Self(hermitian_part(&q))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    /// `(p / n) I`, the isotropic start point.
    pub fn isotropic(n: usize, p: f64) -> Self {
        Self(ComplexMatrix::identity(n, n).scale(p / n as f64))
    }

    /// Random PSD matrix with trace uniform in (0, p_max].
    pub fn random_feasible(n: usize, p_max: f64, rng: &mut impl Rng) -> Self {
        let a = ComplexMatrix::from_fn(n, n, |_, _| complex_normal(rng));
        let q = &a * a.adjoint();
        let t = q.trace().re;
        let target = p_max * (1.0 - rng.random::<f64>());
        Self::from_trusted(q.scale(target / t))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn is_feasible(&self, p_max: f64) -> bool {
        self.trace() <= p_max * (1.0 + 1e-6)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }
}

fn check_inner(g: &ComplexMatrix, q: &TxCovariance, sigma2: f64) -> Result<()> {
    if g.ncols() != q.dim() {
        return Err(Error::ShapeMismatch {
            context: "rate",
            expected: (g.nrows(), q.dim()),
            found: g.shape(),
        });
    }
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "noise power must be positive, got {sigma2}"
        )));
    }
    Ok(())
}

/// `log2 det(I + G Q Gᴴ / σ²)`, evaluated through the eigenvalues of the Gram form.
fn rate(g: &ComplexMatrix, q: &TxCovariance, sigma2: f64) -> Result<f64> {
    check_inner(g, q, sigma2)?;
    let gram = hermitian_part(&(g * q.matrix() * g.adjoint()).unscale(sigma2));
    if frobenius(&gram) == 0.0 {
        return Ok(0.0);
    }
    let evd = hermitian_evd(&gram)?;
    Ok(evd
        .eigenvalues
        .iter()
        .map(|&mu| mu.max(0.0).ln_1p())
        .sum::<f64>()
        / LN_2)
}

pub fn rate_legit(g_tr: &ComplexMatrix, q: &TxCovariance, sigma_r2: f64) -> Result<f64> {
    rate(g_tr, q, sigma_r2)
}

pub fn rate_eave(g_te: &ComplexMatrix, q: &TxCovariance, sigma_e2: f64) -> Result<f64> {
    rate(g_te, q, sigma_e2)
}

/// `R_R - R_E` for fixed effective channels; `clamp` applies `max(0, .)`.
pub fn secrecy_rate_effective(
    eff: &EffectiveChannels,
    q: &TxCovariance,
    clamp: bool,
) -> Result<f64> {
    let r = rate_legit(&eff.g_tr, q, eff.sigma_r2)? - rate_eave(&eff.g_te, q, eff.sigma_e2)?;
    Ok(if clamp { r.max(0.0) } else { r })
}

pub fn secrecy_rate(
    chs: &ChannelSet,
    theta: &ReflectVector,
    q: &TxCovariance,
    clamp: bool,
) -> Result<f64> {
    secrecy_rate_effective(&effective_channels(chs, theta)?, q, clamp)
}
