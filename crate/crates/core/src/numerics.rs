//! Complex linear-algebra primitives shared by every optimizer stage.
//!
//! Dense matrices come from `nalgebra`; this module pins down the Hermitian
//! eigendecomposition convention, the log-determinant, and the tolerances
//! used to decide symmetry, definiteness and rank.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Numerical thresholds used across the crate.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative Frobenius asymmetry accepted as Hermitian.
    pub hermitian_rel: f64,
    /// Smallest eigenvalue accepted as positive definite.
    pub pd_floor: f64,
    /// Reconstruction error budget of the eigendecomposition.
    pub reconstruction: f64,
    /// Relative PSD slack: eigenvalues down to `-psd_rel * trace` count as zero.
    pub psd_rel: f64,
    /// Unit-modulus slack for reflecting coefficients.
    pub unit_modulus: f64,
    /// `|Tr J| <= trace_zero_rel * max(1, ||J||_F)` is treated as zero.
    pub trace_zero_rel: f64,
    /// Second-to-first singular value ratio accepted as rank one.
    pub rank_one_rel: f64,
}

pub const TOL: Tolerances = Tolerances {
    hermitian_rel: 1e-9,
    pd_floor: 1e-12,
    reconstruction: 1e-10,
    psd_rel: 1e-9,
    unit_modulus: 1e-12,
    trace_zero_rel: 1e-10,
    rank_one_rel: 1e-9,
};

const EVD_EPS: f64 = 1e-15;
const EVD_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct EvdResult {
    /// Ascending.
    pub eigenvalues: DVector<f64>,
    /// Orthonormal columns; the first non-negligible entry of each is real and positive.
    pub eigenvectors: ComplexMatrix,
}

impl EvdResult {
    /// `V diag(f(λ)) Vᴴ`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let s = f(lambda);
            scaled.column_mut(j).scale_mut(s);
        }
        &scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_square(m: &ComplexMatrix, context: &'static str) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::ShapeMismatch {
            context,
            expected: (m.nrows(), m.nrows()),
            found: m.shape(),
        });
    }
    Ok(())
}

pub fn relative_asymmetry(m: &ComplexMatrix) -> f64 {
    let norm = frobenius(m);
    if norm == 0.0 {
        return 0.0;
    }
    frobenius(&(m - m.adjoint())) / norm
}

/// `(M + Mᴴ) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
pub fn hermitian_evd(m: &ComplexMatrix) -> Result<EvdResult> {
    ensure_square(m, "hermitian_evd")?;
    if !is_finite(m) {
        return Err(Error::NumericalFailure("non-finite matrix entry"));
    }
    let asymmetry = relative_asymmetry(m);
    if asymmetry > TOL.hermitian_rel {
        return Err(Error::NotHermitian { asymmetry });
    }
    let h = hermitian_part(m);
    let n = h.nrows();
    let eig = SymmetricEigen::try_new(h, EVD_EPS, EVD_MAX_ITERS).ok_or(Error::NumericalFailure(
        "Hermitian eigensolver did not converge",
    ))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        normalize_phase(&mut col);
        eigenvectors.set_column(dst, &col);
    }
    Ok(EvdResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Rotates `v` so its first non-negligible entry is real and positive.
fn normalize_phase(v: &mut ComplexVector) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-8 * scale).copied() {
        let rot = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= rot);
    }
}

/// Natural log-determinant of a Hermitian positive-definite matrix.
pub fn logdet_hpd(m: &ComplexMatrix) -> Result<f64> {
    let evd = hermitian_evd(m)?;
    let min = evd.min_eigenvalue();
    if min <= TOL.pd_floor {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    Ok(evd.eigenvalues.iter().map(|l| l.ln()).sum())
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn inverse_hpd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(m, "inverse_hpd")?;
    let chol = nalgebra::Cholesky::new(hermitian_part(m)).ok_or(Error::NotPositiveDefinite {
        min_eigenvalue: f64::NAN,
    })?;
    Ok(hermitian_part(&chol.inverse()))
}

/// Factor `F` with `F Fᴴ = Q` for a PSD matrix, built as `U Σ^{1/2}`.
/// Eigenvalues below zero (rounding) are clamped.
pub fn psd_factor(q: &ComplexMatrix) -> Result<ComplexMatrix> {
    let evd = hermitian_evd(q)?;
    let mut f = evd.eigenvectors.clone();
    for (j, &l) in evd.eigenvalues.iter().enumerate() {
        f.column_mut(j).scale_mut(l.max(0.0).sqrt());
    }
    Ok(f)
}

/// Orthonormal basis of the orthogonal complement of `b` in `C^n`.
///
/// Columns 2..n of the Householder reflector that maps `b/|b|` onto the
/// first axis; the result spans the same subspace for any rescaling of `b`.
pub fn complement_basis(b: &ComplexVector) -> Result<ComplexMatrix> {
    let n = b.len();
    let norm = b.norm();
    if norm <= 1e-12 {
        return Err(Error::ZeroVector);
    }
    let unit = b.unscale(norm);
    let first = unit[0];
    let phase = if first.norm() > 0.0 {
        first / first.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    // w = unit - alpha e1 with alpha = -phase
    let mut w = unit.clone();
    w[0] += phase;
    let wn2 = w.norm_squared();
    let mut out = ComplexMatrix::zeros(n, n.saturating_sub(1));
    for k in 1..n {
        // column k of I - 2 w wᴴ / (wᴴ w)
        let coeff = w[k].conj() * (2.0 / wn2);
        let mut col = w.map(|z| -z * coeff);
        col[k] += Complex64::new(1.0, 0.0);
        out.set_column(k - 1, &col);
    }
    Ok(out)
}
