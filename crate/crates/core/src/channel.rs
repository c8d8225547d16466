//! Scenario geometry, path loss, Rician fading and the IRS-composed channels.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{is_finite, ComplexMatrix, ComplexVector, TOL};
use crate::streams::{self, tag};

/// A point in the 2-D deployment plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Direction of `other` as seen from `self`, radians from the x axis.
    pub fn bearing(&self, other: &Position) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }
}

/// The five propagation links of the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    /// AP to legitimate user.
    Tr,
    /// AP to eavesdropper.
    Te,
    /// AP to IRS.
    Ts,
    /// IRS to legitimate user.
    Sr,
    /// IRS to eavesdropper.
    Se,
}

impl Link {
    pub const ALL: [Link; 5] = [Link::Tr, Link::Te, Link::Ts, Link::Sr, Link::Se];

    fn stream_tag(self) -> u64 {
        match self {
            Link::Tr => 1,
            Link::Te => 2,
            Link::Ts => 3,
            Link::Sr => 4,
            Link::Se => 5,
        }
    }
}

/// One value per link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerLink<T> {
    pub tr: T,
    pub te: T,
    pub ts: T,
    pub sr: T,
    pub se: T,
}

impl<T: Copy> PerLink<T> {
    pub const fn uniform(v: T) -> Self {
        Self {
            tr: v,
            te: v,
            ts: v,
            sr: v,
            se: v,
        }
    }

    pub fn get(&self, link: Link) -> T {
        match link {
            Link::Tr => self.tr,
            Link::Te => self.te,
            Link::Ts => self.ts,
            Link::Sr => self.sr,
            Link::Se => self.se,
        }
    }
}

/// Deterministic line-of-sight component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LosModel {
    /// Outer product of half-wavelength ULA steering vectors (arrays along the y axis).
    #[default]
    Steering,
    /// All-ones matrix.
    Ones,
}

/// Deployment and propagation parameters. All powers are linear watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_t: usize,
    pub n_r: usize,
    pub n_e: usize,
    pub m: usize,
    pub ap: Position,
    pub user: Position,
    pub eave: Position,
    pub irs: Position,
    pub p_max: f64,
    pub sigma_r2: f64,
    pub sigma_e2: f64,
    pub rician: PerLink<f64>,
    pub path_loss_exponent: PerLink<f64>,
    pub beta0_db: f64,
    pub d0: f64,
    pub los_model: LosModel,
    pub master_seed: u64,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl Default for ScenarioConfig {
    /// The superior-legitimate-channel deployment: AP (0,0), user (45,0),
    /// eavesdropper (55,0), IRS (50,5); four antennas everywhere, 20 elements,
    /// -40 dBm noise, 30 dBm budget, Rician links only between IRS and receivers.
    fn default() -> Self {
        Self {
            n_t: 4,
            n_r: 4,
            n_e: 4,
            m: 20,
            ap: Position::new(0.0, 0.0),
            user: Position::new(45.0, 0.0),
            eave: Position::new(55.0, 0.0),
            irs: Position::new(50.0, 5.0),
            p_max: dbm_to_watts(30.0),
            sigma_r2: dbm_to_watts(-40.0),
            sigma_e2: dbm_to_watts(-40.0),
            rician: PerLink {
                tr: 0.0,
                te: 0.0,
                ts: 0.0,
                sr: 1.0,
                se: 1.0,
            },
            path_loss_exponent: PerLink::uniform(2.0),
            beta0_db: -30.0,
            d0: 1.0,
            los_model: LosModel::Steering,
            master_seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        for (name, v) in [
            ("n_t", self.n_t),
            ("n_r", self.n_r),
            ("n_e", self.n_e),
            ("m", self.m),
        ] {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        for (name, v) in [
            ("p_max", self.p_max),
            ("sigma_r2", self.sigma_r2),
            ("sigma_e2", self.sigma_e2),
            ("d0", self.d0),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.beta0_db.is_finite() {
            return bad("beta0_db must be finite".into());
        }
        for link in Link::ALL {
            let k = self.rician.get(link);
            let a = self.path_loss_exponent.get(link);
            if !(k.is_finite() && k >= 0.0) {
                return bad(format!(
                    "Rician factor of {link:?} must be non-negative, got {k}"
                ));
            }
            if !(a.is_finite() && a > 0.0) {
                return bad(format!(
                    "path loss exponent of {link:?} must be positive, got {a}"
                ));
            }
            if self.link_distance(link) <= 0.0 {
                return bad(format!("endpoints of {link:?} coincide"));
            }
        }
        Ok(())
    }

    /// The inferior-legitimate-channel variant: user and eavesdropper trade places.
    pub fn with_swapped_receivers(&self) -> Self {
        let mut out = self.clone();
        std::mem::swap(&mut out.user, &mut out.eave);
        out
    }

    fn endpoints(&self, link: Link) -> (Position, Position) {
        match link {
            Link::Tr => (self.ap, self.user),
            Link::Te => (self.ap, self.eave),
            Link::Ts => (self.ap, self.irs),
            Link::Sr => (self.irs, self.user),
            Link::Se => (self.irs, self.eave),
        }
    }

    /// (receive, transmit) antenna counts of a link.
    fn link_shape(&self, link: Link) -> (usize, usize) {
        match link {
            Link::Tr => (self.n_r, self.n_t),
            Link::Te => (self.n_e, self.n_t),
            Link::Ts => (self.m, self.n_t),
            Link::Sr => (self.n_r, self.m),
            Link::Se => (self.n_e, self.m),
        }
    }

    pub fn link_distance(&self, link: Link) -> f64 {
        let (a, b) = self.endpoints(link);
        a.distance(&b)
    }

    pub fn link_gain(&self, link: Link) -> Result<f64> {
        let db = path_loss_db(
            self.link_distance(link),
            self.path_loss_exponent.get(link),
            self.beta0_db,
            self.d0,
        )?;
        Ok(db_to_linear(db))
    }

    fn los(&self, link: Link) -> ComplexMatrix {
        let (rows, cols) = self.link_shape(link);
        match self.los_model {
            LosModel::Ones => ComplexMatrix::from_element(rows, cols, Complex64::new(1.0, 0.0)),
            LosModel::Steering => {
                let (tx, rx) = self.endpoints(link);
                let arrival = steering(rows, rx.bearing(&tx));
                let departure = steering(cols, tx.bearing(&rx));
                &arrival * departure.adjoint()
            }
        }
    }
}

/// Half-wavelength ULA response along the y axis.
fn steering(n: usize, bearing: f64) -> ComplexVector {
    let step = PI * bearing.sin();
    ComplexVector::from_fn(n, |k, _| Complex64::from_polar(1.0, step * k as f64))
}

/// Log-distance path loss in dB.
pub fn path_loss_db(d: f64, alpha: f64, beta0_db: f64, d0: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::NonPositiveDistance(d));
    }
    if !(d0 > 0.0) {
        return Err(Error::NonPositiveDistance(d0));
    }
    Ok(beta0_db - 10.0 * alpha * (d / d0).log10())
}

/// Standard circularly-symmetric complex Gaussian sample.
pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `sqrt(beta/(kappa+1)) * (sqrt(kappa) * los + nlos)`.
pub fn rician_combine(
    los: &ComplexMatrix,
    nlos: &ComplexMatrix,
    kappa: f64,
    beta_linear: f64,
) -> Result<ComplexMatrix> {
    if los.shape() != nlos.shape() {
        return Err(Error::ShapeMismatch {
            context: "rician_combine",
            expected: los.shape(),
            found: nlos.shape(),
        });
    }
    let scale = (beta_linear / (kappa + 1.0)).sqrt();
    Ok((los.scale(kappa.sqrt()) + nlos).scale(scale))
}

/// Rician-faded matrix whose scattered part is drawn row-major from `rng`.
pub fn sample_rician(
    rows: usize,
    cols: usize,
    kappa: f64,
    beta_linear: f64,
    los: &ComplexMatrix,
    rng: &mut impl Rng,
) -> Result<ComplexMatrix> {
    if los.shape() != (rows, cols) {
        return Err(Error::ShapeMismatch {
            context: "sample_rician",
            expected: (rows, cols),
            found: los.shape(),
        });
    }
    let mut nlos = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            nlos[(r, c)] = complex_normal(rng);
        }
    }
    rician_combine(los, &nlos, kappa, beta_linear)
}

/// Channel matrices of one realization plus the receiver noise powers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// N_R x N_T
    pub h_tr: ComplexMatrix,
    /// N_E x N_T
    pub h_te: ComplexMatrix,
    /// N_R x M
    pub h_sr: ComplexMatrix,
    /// N_E x M
    pub h_se: ComplexMatrix,
    /// M x N_T
    pub h_ts: ComplexMatrix,
    pub sigma_r2: f64,
    pub sigma_e2: f64,
}

impl ChannelSet {
    pub fn new(
        h_tr: ComplexMatrix,
        h_te: ComplexMatrix,
        h_sr: ComplexMatrix,
        h_se: ComplexMatrix,
        h_ts: ComplexMatrix,
        sigma_r2: f64,
        sigma_e2: f64,
    ) -> Result<Self> {
        let set = Self {
            h_tr,
            h_te,
            h_sr,
            h_se,
            h_ts,
            sigma_r2,
            sigma_e2,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        let (n_r, n_t) = self.h_tr.shape();
        let n_e = self.h_te.nrows();
        let m = self.h_ts.nrows();
        let checks = [
            ("h_te", (n_e, n_t), self.h_te.shape()),
            ("h_sr", (n_r, m), self.h_sr.shape()),
            ("h_se", (n_e, m), self.h_se.shape()),
            ("h_ts", (m, n_t), self.h_ts.shape()),
        ];
        for (context, expected, found) in checks {
            if expected != found {
                return Err(Error::ShapeMismatch {
                    context,
                    expected,
                    found,
                });
            }
        }
        if n_r == 0 || n_t == 0 || n_e == 0 || m == 0 {
            return Err(Error::InvalidConfig("empty channel dimension".into()));
        }
        for h in [&self.h_tr, &self.h_te, &self.h_sr, &self.h_se, &self.h_ts] {
            if !is_finite(h) {
                return Err(Error::NumericalFailure("non-finite channel entry"));
            }
        }
        if !(self.sigma_r2 > 0.0 && self.sigma_e2 > 0.0) {
            return Err(Error::InvalidConfig("noise powers must be positive".into()));
        }
        Ok(())
    }

    pub fn n_t(&self) -> usize {
        self.h_tr.ncols()
    }

    pub fn n_r(&self) -> usize {
        self.h_tr.nrows()
    }

    pub fn n_e(&self) -> usize {
        self.h_te.nrows()
    }

    pub fn m(&self) -> usize {
        self.h_ts.nrows()
    }

    /// Copy with both IRS-to-receiver links zeroed.
    pub fn without_irs(&self) -> Self {
        let mut out = self.clone();
        out.h_sr.fill(Complex64::new(0.0, 0.0));
        out.h_se.fill(Complex64::new(0.0, 0.0));
        out
    }

    /// Unit-variance i.i.d. Rayleigh channels, for tests and oracles.
    pub fn random_gaussian(
        n_t: usize,
        n_r: usize,
        n_e: usize,
        m: usize,
        sigma2: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let mut draw = |r, c| ComplexMatrix::from_fn(r, c, |_, _| complex_normal(rng));
        Self {
            h_tr: draw(n_r, n_t),
            h_te: draw(n_e, n_t),
            h_sr: draw(n_r, m),
            h_se: draw(n_e, m),
            h_ts: draw(m, n_t),
            sigma_r2: sigma2,
            sigma_e2: sigma2,
        }
    }
}

/// Draws one realization of every link.
///
/// Each scattered entry is keyed by (master seed, realization, link, row,
/// column), so draws are reproducible and nested: adding antennas or IRS
/// elements extends a matrix without changing its existing entries.
pub fn scenario_channels(cfg: &ScenarioConfig, realization_index: u64) -> Result<ChannelSet> {
    cfg.validate()?;
    let draw = |link: Link| -> Result<ComplexMatrix> {
        let (rows, cols) = cfg.link_shape(link);
        let nlos = ComplexMatrix::from_fn(rows, cols, |r, c| {
            let mut rng = streams::stream(&[
                cfg.master_seed,
                tag::CHANNEL,
                realization_index,
                link.stream_tag(),
                r as u64,
                c as u64,
            ]);
            complex_normal(&mut rng)
        });
        rician_combine(
            &cfg.los(link),
            &nlos,
            cfg.rician.get(link),
            cfg.link_gain(link)?,
        )
    };
    ChannelSet::new(
        draw(Link::Tr)?,
        draw(Link::Te)?,
        draw(Link::Sr)?,
        draw(Link::Se)?,
        draw(Link::Ts)?,
        cfg.sigma_r2,
        cfg.sigma_e2,
    )
}

/// Unit-modulus IRS reflecting coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectVector(Vec<Complex64>);

impl ReflectVector {
    pub fn new(theta: Vec<Complex64>) -> Result<Self> {
        for z in &theta {
            let modulus = z.norm();
            if (modulus - 1.0).abs() > TOL.unit_modulus || !modulus.is_finite() {
                return Err(Error::NonUnitModulus { modulus });
            }
        }
        Ok(Self(theta))
    }

    pub fn from_phases(phases: &[f64]) -> Self {
        Self(
            phases
                .iter()
                .map(|&p| Complex64::from_polar(1.0, p))
                .collect(),
        )
    }

    pub fn ones(m: usize) -> Self {
        Self(vec![Complex64::new(1.0, 0.0); m])
    }

    /// Phases i.i.d. uniform on [0, 2pi).
    pub fn random(m: usize, rng: &mut impl Rng) -> Self {
        let phases: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
        Self::from_phases(&phases)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn get(&self, m: usize) -> Complex64 {
        self.0[m]
    }

    /// Replaces one coefficient; `value` must be unit modulus.
    pub fn set(&mut self, m: usize, value: Complex64) -> Result<()> {
        let modulus = value.norm();
        if (modulus - 1.0).abs() > TOL.unit_modulus {
            return Err(Error::NonUnitModulus { modulus });
        }
        let len = self.0.len();
        *self
            .0
            .get_mut(m)
            .ok_or(Error::IndexOutOfRange { index: m, len })? = value;
        Ok(())
    }

    /// Phases in [0, 2pi).
    pub fn phases(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|z| z.arg().rem_euclid(2.0 * PI))
            .collect()
    }

    /// `sum_m |a_m - b_m|`, the movement used by the convergence tests.
    pub fn l1_distance(&self, other: &ReflectVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .sum()
    }
}

/// Equivalent channels seen by the receivers for a given IRS configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    pub g_tr: ComplexMatrix,
    pub g_te: ComplexMatrix,
    pub sigma_r2: f64,
    pub sigma_e2: f64,
}

impl EffectiveChannels {
    /// Direct links only, ignoring the IRS.
    pub fn direct(chs: &ChannelSet) -> Self {
        Self {
            g_tr: chs.h_tr.clone(),
            g_te: chs.h_te.clone(),
            sigma_r2: chs.sigma_r2,
            sigma_e2: chs.sigma_e2,
        }
    }

    pub fn n_t(&self) -> usize {
        self.g_tr.ncols()
    }
}

/// `G_TR = H_TR + H_SR diag(θ) H_TS` and likewise for the eavesdropper.
pub fn effective_channels(chs: &ChannelSet, theta: &ReflectVector) -> Result<EffectiveChannels> {
    if theta.len() != chs.m() {
        return Err(Error::ShapeMismatch {
            context: "effective_channels",
            expected: (chs.m(), 1),
            found: (theta.len(), 1),
        });
    }
    let mut reflected = chs.h_ts.clone();
    for (m, t) in theta.as_slice().iter().enumerate() {
        reflected.row_mut(m).iter_mut().for_each(|z| *z *= t);
    }
    Ok(EffectiveChannels {
        g_tr: &chs.h_tr + &chs.h_sr * &reflected,
        g_te: &chs.h_te + &chs.h_se * &reflected,
        sigma_r2: chs.sigma_r2,
        sigma_e2: chs.sigma_e2,
    })
}
